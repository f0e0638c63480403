class TobogganError(Exception):
    pass


class ValidationError(TobogganError, ValueError):
    pass


class CriticalProximity(TobogganError):
    pass


class RefinementExhausted(TobogganError):
    pass


class OriginSingularity(TobogganError):
    pass


class ContourTruncated(TobogganError):
    pass


class RayGrazing(TobogganError):
    pass


class NotPTSymmetric(TobogganError):
    pass


class NonReducible(TobogganError):
    pass


class PoleProximity(TobogganError):
    pass


class StepUnderflow(TobogganError):
    pass


class NoConvergence(TobogganError):
    pass
