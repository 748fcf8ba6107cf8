from tubalfgd.sensing.base import DEFAULT_CHUNK_SIZE, BaseEnsemble, normalize_mode
from tubalfgd.sensing.dense import DEFAULT_MAX_DENSE_BYTES, DenseEnsemble, dense_bytes
from tubalfgd.sensing.ensemble import adjoint, make_ensemble, measure
from tubalfgd.sensing.problem import ProblemInstance, gen_problem
from tubalfgd.sensing.rip import RipEstimate, empirical_rip, rip_ratios
from tubalfgd.sensing.streamed import StreamedEnsemble

__all__ = [
    "DEFAULT_CHUNK_SIZE",
    "DEFAULT_MAX_DENSE_BYTES",
    "BaseEnsemble",
    "StreamedEnsemble",
    "DenseEnsemble",
    "dense_bytes",
    "normalize_mode",
    "make_ensemble",
    "measure",
    "adjoint",
    "ProblemInstance",
    "gen_problem",
    "RipEstimate",
    "empirical_rip",
    "rip_ratios",
]
