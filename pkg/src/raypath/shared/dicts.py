
class DotDict(dict):
    """Dictionary with dot access, used for loaded configuration sections.

    Nested dictionaries come back wrapped, so ``config.commands.tcdf.radius`` works
    when every level exists and yields None otherwise.

     usage:
     >>> section = DotDict({"tcdf": {"radius": 2}})
     >>> section.tcdf.radius
     2
    """

    __slots__ = ()
    __setattr__ = dict.__setitem__
    __delattr__ = dict.__delitem__

    def __getattr__(self, k):
        """Get value, None when missing."""
        return self.get(k)

    def get(self, k, default=None):
        """Get value, returns default if key doesn't exist."""
        value = super().get(k, default)
        if isinstance(value, dict) and not isinstance(value, DotDict):
            return DotDict(value)
        return value

    def section(self, name: str) -> "DotDict":
        """Return a nested section, empty when absent or not a mapping."""
        value = self.get(name)
        return value if isinstance(value, DotDict) else DotDict()
