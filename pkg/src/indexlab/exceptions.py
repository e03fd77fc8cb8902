"""Hiérarchie d'exceptions du laboratoire.

Chaque erreur porte le code de sortie de la CLI : 2 pour une violation
d'invariant ou une entrée invalide, 3 pour une non-convergence numérique.
"""


class IndexLabError(RuntimeError):
    """Erreur de base de indexlab."""

    exit_code = 2


class InvariantViolation(IndexLabError):
    """Un invariant mathématique vérifié numériquement est violé."""


class NonConvergence(IndexLabError):
    """Une procédure itérative ou une extrapolation n'a pas convergé."""

    exit_code = 3


class ConfigError(IndexLabError):
    """Configuration de run invalide (clé inconnue, valeur illisible)."""


class PoleHit(IndexLabError):
    """Évaluation sur un pôle (|den| sous la tolérance)."""

    def __init__(self, message: str, point: complex | None = None):
        super().__init__(message)
        self.point = point


class LatticePointHit(PoleHit):
    """Évaluation de ℘ ou ℘′ sur un point du réseau."""


class PeriodViolation(InvariantViolation):
    """Deux chemins homotopiquement distincts donnent des immersions différentes."""


class InconsistentMultiplicity(InvariantViolation):
    """Multiplicité algébrique et enroulement de Γ_R en désaccord."""


class PlanarInput(IndexLabError):
    """Topologie plane (degré de Jorge-Meeks nul) là où une surface non plane est requise."""


class MeshFailure(IndexLabError):
    """Région dégénérée ou carte non supportée par le mailleur."""


class SingularPivot(IndexLabError):
    """Pivot nul pendant la factorisation symétrique, même après perturbation."""


class DegenerateBasis(InvariantViolation):
    """Matrice de Gram L²* singulière : la base n'est pas libre."""

    def __init__(self, message: str, condition_number: float = float("inf")):
        super().__init__(message)
        self.condition_number = condition_number


class NotEigenform(InvariantViolation):
    """La forme n'est pas un vecteur propre des réflexions (signes incohérents)."""


class NonConvergent(NonConvergence):
    """Extrapolation de Richardson non convergée."""

    def __init__(self, message: str, value: float = float("nan"), residual: float = float("nan")):
        super().__init__(message)
        self.value = value
        self.residual = residual


class NotStabilized(NonConvergence):
    """Les comptes d'exhaustion ne se sont pas stabilisés.

    Attributes:
        report: Rapport spectral partiel (comptes par étape, sans estimation)
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceFailure(NonConvergence):
    """Le solveur shift-invert n'a pas convergé ou le comptage par inertie le contredit."""
