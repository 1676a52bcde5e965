from enum import Enum


class Severity(str, Enum):
    """The three attack groups, declared most severe first."""

    DANGEROUS = "Dangerous"
    RATHER_DANGEROUS = "RatherDangerous"
    NOT_DANGEROUS = "NotDangerous"

    @property
    def rank(self) -> int:
        return SEVERITY_ORDER.index(self)


SEVERITY_ORDER = (Severity.DANGEROUS, Severity.RATHER_DANGEROUS, Severity.NOT_DANGEROUS)
