import copy
import os

import yaml

from tubalfgd.errors import InvalidParameter
from tubalfgd.experiments.base import BaseExperiment

current_dir = os.path.dirname(os.path.abspath(__file__))
DEFAULT_CONFIG_YAML_PATH = os.path.join(current_dir, "config.yaml")


def merge_settings(base: dict, override: dict) -> dict:
    """
    Recursively merge ``override`` into a copy of ``base``.

    Nested dictionaries are merged key by key; any other value in
    ``override`` replaces the one in ``base``.
    """
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_settings(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class Configuration:
    """
    Configuration class for tubalfgd.

    Holds the runtime settings shared by every command and, per experiment
    command, the experiment class and its defaults. Measurement ensembles
    follow the runtime ``measurement`` and ``materialization`` settings.
    Settings are read from the packaged YAML file, optionally overlaid with
    a user file.
    """

    def __init__(self, config_path: str = DEFAULT_CONFIG_YAML_PATH):
        """
        Initialize the Configuration object.

        Args:
            config_path: Path to the configuration YAML file. Defaults to the
                packaged config.yaml.
        """
        config_data = self.load_config_from_yaml(config_path)
        self.runtime = config_data["runtime"]
        self.experiment_settings = config_data["experiment_settings"]

    def load_config_from_yaml(self, config_path: str):
        """
        Load configuration from a YAML file.

        Args:
            config_path: Path to the configuration YAML file.

        Returns:
            The loaded configuration data as a dictionary.
        """
        with open(config_path, "r") as file:
            return yaml.safe_load(file) or {}

    def update_from_yaml(self, config_path: str):
        """
        Overlay the settings of another YAML file onto this configuration.

        Only the keys present in the file change; sections it omits keep
        their current values.

        Args:
            config_path: Path to the overriding YAML file.

        Raises:
            InvalidParameter: If the file names an unknown section or command.
        """
        config_data = self.load_config_from_yaml(config_path)
        unknown = set(config_data) - {"runtime", "experiment_settings"}
        if unknown:
            raise InvalidParameter(f"Unsupported configuration sections: {sorted(unknown)}")
        for command in config_data.get("experiment_settings", {}):
            if command not in self.experiment_settings:
                raise InvalidParameter(f"Unsupported experiment command: {command}")
        self.runtime = merge_settings(self.runtime, config_data.get("runtime", {}))
        self.experiment_settings = merge_settings(
            self.experiment_settings, config_data.get("experiment_settings", {})
        )

    def set_runtime(self, **settings):
        """
        Override runtime settings; ``None`` values are ignored.
        """
        self.runtime.update({k: v for k, v in settings.items() if v is not None})

    def set_experiment_config(self, command: str, settings: dict):
        """
        Merge settings into the configuration of an experiment command.

        Args:
            command: The command name (e.g., 'convergence', 'lemma-check').
            settings: Config fields to override; ``None`` values are ignored.

        Raises:
            InvalidParameter: If the command is not supported.
        """
        if command not in self.experiment_settings:
            raise InvalidParameter(f"Unsupported experiment command: {command}")
        overrides = {k: v for k, v in settings.items() if v is not None}
        section = self.experiment_settings[command]
        section["config"] = merge_settings(section.get("config") or {}, overrides)

    def get_experiment_config(self, command: str):
        """
        Get the experiment class name and its configuration for a command.

        Raises:
            InvalidParameter: If the command is not supported.
        """
        if command not in self.experiment_settings:
            raise InvalidParameter(f"Unsupported experiment command: {command}")

        return self.experiment_settings[command]


class ModuleFactory:
    """
    Factory class for creating experiments.

    The class to instantiate is looked up by the provider name stored in the
    configuration.
    """

    def __init__(self, config: Configuration):
        """
        Initialize the ModuleFactory.

        Args:
            config: The Configuration object holding the experiment settings.
        """
        self.config = config

    def _create_instance(self, module_name: str, class_name: str, settings: dict):
        # e.g.
        # module_name = "tubalfgd.experiments"
        # class_name = "RipExperiment"
        module = __import__(module_name, fromlist=[class_name])
        class_ = getattr(module, class_name, None)
        if class_ is None:
            raise InvalidParameter(f"Unsupported provider: {class_name} in {module_name}")
        return class_(**settings)

    def create_experiment(self, command: str) -> BaseExperiment:
        """
        Create the experiment for a command with runtime and command settings merged.

        Args:
            command: The command name (e.g., 'convergence').

        Returns:
            An instance of a BaseExperiment implementation.

        Raises:
            InvalidParameter: If the command is not supported.
            pydantic.ValidationError: If a merged setting is invalid.
        """
        settings = self.config.get_experiment_config(command)
        return self._create_instance(
            "tubalfgd.experiments",
            settings["provider"],
            {**self.config.runtime, **(settings.get("config") or {})},
        )
