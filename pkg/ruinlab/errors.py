"""
Excepciones de ruinlab

Cada error lleva un detalle estructurado y el código de salida que usa la CLI
(0 ok / 2 inválido / 3 inconcluso).
"""

from typing import Any, Dict, List, Optional

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3


class RuinLabError(Exception):
    """Error base con detalle estructurado"""

    exit_code = EXIT_INVALID

    def __init__(self, message: str, **detail: Any):
        super().__init__(message)
        self.message = message
        self.detail: Dict[str, Any] = {"error": type(self).__name__, "message": message, **detail}


class InvalidTripletError(RuinLabError):
    """Tripleta de Lévy inválida (p. ej. masa de saltos en x <= -1)"""


class DomainError(RuinLabError):
    """Argumento fuera del dominio efectivo de una función generadora"""

    def __init__(self, message: str, q_lo: float, q_hi: float, stage: str = "levy"):
        super().__init__(message, q_lo=q_lo, q_hi=q_hi, stage=stage)
        self.q_lo = q_lo
        self.q_hi = q_hi
        self.stage = stage


class HeavyTailError(RuinLabError):
    """Ley entre siniestros sin momento exponencial"""


class DegenerateResidualError(RuinLabError):
    """La ley residual F^r no existe (r fuera del soporte)"""


class InvalidModelError(RuinLabError):
    """Modelo de negocio o política de simulación inválidos"""


class NoPositiveRootError(RuinLabError):
    """ψ no tiene raíz positiva"""


class DegenerateInvestmentError(RuinLabError):
    """R es determinista: σ² = 0 y sin saltos"""


class RootAtBoundaryError(RuinLabError):
    """La raíz cae en el borde del dominio efectivo"""


class BetaConvergenceError(RuinLabError):
    """El solver de β no alcanzó la tolerancia"""


class CensoredSampleError(RuinLabError):
    """Se agotó el presupuesto de siniestros antes de truncar la serie de Y∞"""

    def __init__(self, message: str, n_blocks: int):
        super().__init__(message, n_blocks=n_blocks)
        self.n_blocks = n_blocks


class DegenerateInputError(RuinLabError):
    """Datos de entrada degenerados para un estimador"""


class ConfigSyntaxError(RuinLabError):
    """JSON mal formado"""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class ConfigError(RuinLabError):
    """Configuración con una o más violaciones"""

    def __init__(self, violations: List[str], message: Optional[str] = None):
        super().__init__(message or f"Configuración inválida ({len(violations)} violaciones)", violations=violations)
        self.violations = violations


class LedgerNotFoundError(RuinLabError):
    """No hay registro de corridas en el directorio pedido"""


class InconclusiveError(RuinLabError):
    """Resultado estadístico inconcluso"""

    exit_code = EXIT_INCONCLUSIVE
