"""Exception types shared across the package."""


class ModelSetError(Exception):
    """Base class for all library errors."""


# --- lattice algebra ---

class SingularBasis(ModelSetError):
    pass


class DimensionMismatch(ModelSetError):
    pass


class NotASublattice(ModelSetError):
    pass


class IndexOutOfRange(ModelSetError):
    pass


# --- family validation ---

class ValidationError(ModelSetError):
    """Base class for family-validation failures."""


class NotProper(ValidationError):
    pass


class NotCoprime(ValidationError):
    def __init__(self, i: int, j: int):
        super().__init__(f"members {i} and {j} are not coprime")
        self.pair = (i, j)


class GcdLawViolation(ValidationError):
    def __init__(self, F, Fp):
        super().__init__(f"gcd law fails for F={sorted(F)}, F'={sorted(Fp)}")
        self.sets = (tuple(sorted(F)), tuple(sorted(Fp)))


class DivergentIndexSum(ValidationError):
    pass


# --- family / point-set operations ---

class NotInGamma(ModelSetError):
    pass


class NoTailBound(ModelSetError):
    pass


class BadExponent(ModelSetError):
    pass


class VerificationFailed(ModelSetError):
    pass


class ShiftNotInGamma(ModelSetError):
    pass


# --- diffraction ---

class NotInSpectrum(ModelSetError):
    pass


class DenominatorNotSquareFree(ModelSetError):
    pass


class SupportNotCovered(ModelSetError):
    pass


# --- hull checks ---

class PatternTooLarge(ModelSetError):
    pass


class PatternLargerThanRegion(ModelSetError):
    pass
