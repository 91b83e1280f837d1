"""Errors shared across the localization pipeline."""


class DisconnectedGraphError(RuntimeError):
    """The measured range graph split into more than one component."""

    def __init__(self, components: int):
        super().__init__(f"range graph is disconnected ({components} components)")
        self.components = components


class ConfigurationError(RuntimeError):
    """A sweep configuration point cannot produce a usable network."""
