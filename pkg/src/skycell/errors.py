"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """Invalid or inconsistent scenario configuration / CLI input."""


class CapacityError(RuntimeError):
    """A sector was asked to serve more UEs than it has antennas."""


class SingularChannelError(RuntimeError):
    """Channel matrix too ill-conditioned for zero-forcing inversion."""
