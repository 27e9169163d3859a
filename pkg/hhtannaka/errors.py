class HHTannakaError(ValueError):
    pass


class DegreeOutsideExactWindow(HHTannakaError):
    def __init__(self, degree: int, window, required_depth: int | None = None):
        self.degree, self.window, self.required_depth = degree, window, required_depth
        msg = f"degree {degree} needs {degree - 1}..{degree + 1} inside the exact window {window}"
        if required_depth is not None:
            msg += f"; rebuild with truncation level >= {required_depth}"
        super().__init__(msg)


class WindowViolation(HHTannakaError):
    pass


class CoalgebraAxiomFailure(HHTannakaError):
    pass


class NaturalityFailure(HHTannakaError):
    pass


class ComponentNotQuasiIso(HHTannakaError):
    pass


class StrictnessViolation(HHTannakaError):
    pass


class MissingDualityData(HHTannakaError):
    pass


class SNotSubset(HHTannakaError):
    pass


class VNotSubcomplex(HHTannakaError):
    pass


class CoalgebraMismatch(HHTannakaError):
    pass


class NotCompactPresentation(HHTannakaError):
    pass


class ProjectParseError(HHTannakaError):
    pass
