"""
Excepciones del simulador de momentos

Jerarquía única para que la CLI pueda traducir cada falla a un código
de salida (1 uso, 2 numérico, 3 verificación).
"""


class MomentosError(Exception):
    """Error base del paquete"""
    codigo_salida = 1


# ============================================================================
# ERRORES DE CONTRATO (argumentos inválidos)
# ============================================================================

class TruncamientoInvalidoError(MomentosError, ValueError):
    """Orden de truncamiento N < 2"""


class OrdenInvalidoError(MomentosError, ValueError):
    """Orden n del corchete par o menor que 1"""


class ConfiguracionInvalidaError(MomentosError, ValueError):
    """Configuración (n, s, e) fuera de las cotas del coeficiente 𝒦"""


class ConfiguracionMalformadaError(MomentosError, ValueError):
    """Denominador binomial nulo con numerador no nulo dentro del rango"""


class EstadoIncompletoError(MomentosError, KeyError):
    """El estado no entrega un símbolo requerido por la expresión"""

    def __str__(self):
        return str(self.args[0]) if self.args else "estado incompleto"


class HamiltonianoNoSoportadoError(MomentosError, ValueError):
    """El Hamiltoniano clásico no cabe en el lenguaje de términos"""


class VariablesIncompatiblesError(MomentosError, ValueError):
    """Dos sistemas efectivos no comparten el mismo conjunto de variables"""


class EscenarioIncorrectoError(MomentosError, ValueError):
    """Escenario usado en una corrida que no le corresponde (p. ej. l ≠ 0 en run_l0)"""


class EstadoInicialRechazadoError(MomentosError, ValueError):
    """Condición inicial física que viola la relación de incertidumbre"""


class ArchivoEscenarioError(MomentosError, ValueError):
    """Archivo de escenario con claves desconocidas o valores mal tipados"""

    def __init__(self, ruta, diagnosticos):
        self.ruta = str(ruta)
        self.diagnosticos = list(diagnosticos)
        detalle = "; ".join(self.diagnosticos)
        super().__init__(f"Escenario inválido ({self.ruta}): {detalle}")


# ============================================================================
# ERRORES NUMÉRICOS
# ============================================================================

class SingularidadError(MomentosError, ArithmeticError):
    """Evaluación con r ≤ r_min"""
    codigo_salida = 2


# ============================================================================
# ERRORES DE VERIFICACIÓN
# ============================================================================

class CapacidadOraculoError(MomentosError, ValueError):
    """Momento de orden mayor al tope del oráculo"""


class TerminoImaginarioError(MomentosError, ArithmeticError):
    """Sobrevive un término imaginario en un corchete del oráculo"""
    codigo_salida = 3
