from tubalfgd.algebra import Tensor3, t_product
from tubalfgd.sensing import gen_problem
from tubalfgd.solver import FgdConfig, fgd_solve

__all__ = ["Tensor3", "t_product", "gen_problem", "FgdConfig", "fgd_solve"]
