"""Exception hierarchy.

``ValidationError`` subclasses signal bad input (CLI exit code 1);
``InternalError`` subclasses signal a broken invariant that should never
fire on valid median algebras (CLI exit code 2).
"""


class MedianLabError(Exception):
    pass


class ValidationError(MedianLabError):
    pass


class InternalError(MedianLabError):
    pass


class AxiomViolation(ValidationError):
    def __init__(self, axiom, witness, violations=None):
        self.axiom = axiom
        self.witness = tuple(witness)
        self.violations = list(violations or [(axiom, self.witness)])
        super().__init__(f"axiom {axiom} fails at {self.witness}")


class NotConvex(ValidationError):
    pass


class NotSubalgebra(ValidationError):
    pass


class NotCube(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class NotAutomorphism(ValidationError):
    def __init__(self, generator, witness):
        self.generator = generator
        self.witness = tuple(witness)
        super().__init__(f"generator {generator!r} is not a median automorphism; witness triple {self.witness}")


class NotGenerating(ValidationError):
    pass


class NotEquivariant(ValidationError):
    pass


class NotFactorizable(InternalError):
    pass


class NoWitness(InternalError):
    pass


class SpectrumViolation(InternalError):
    def __init__(self, family, mass):
        self.family = tuple(family)
        self.mass = mass
        super().__init__(f"mass {mass} of intersection {self.family} is not 0 or a dyadic 2^-s")


class InternalInconsistency(InternalError):
    pass


class Mismatch(InternalError):
    def __init__(self, component, witness):
        self.component = component
        self.witness = witness
        super().__init__(f"{component}: {witness}")
