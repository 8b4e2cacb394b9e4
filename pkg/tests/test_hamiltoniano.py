"""
Tests del Hamiltoniano efectivo
"""
import pytest

from app.excepciones import HamiltonianoNoSoportadoError, SingularidadError
from app.models.expresiones import G, simbolo
from app.models.momentos import MomentIndex
from app.services.hamiltoniano_service import (
    ClassicalModel,
    build_HQ_hydrogen,
    build_HQ_taylor,
    classical_limit,
    evaluate,
    modelo_hidrogeno,
    modelo_oscilador,
    obtener_modelo,
)
from tests.conftest import estado_hidrogeno


@pytest.mark.parametrize("N", [2, 3, 4])
def test_forma_cerrada_igual_a_taylor(N):
    assert build_HQ_hydrogen(None, None, N) == build_HQ_taylor(modelo_hidrogeno(), N)


def test_cotas_de_las_sumas():
    completo = build_HQ_hydrogen(None, None, 4)
    acotado = build_HQ_hydrogen(2, 1, 4)
    assert MomentIndex.de(3, 0, 0, 0) not in acotado.momentos_presentes()
    assert MomentIndex.de(3, 0, 0, 0) in completo.momentos_presentes()
    assert len(acotado) < len(completo)


def test_limite_clasico():
    assert classical_limit(build_HQ_hydrogen(None, None, 3)) == modelo_hidrogeno().hamiltoniano


def test_oscilador_es_cuadratico():
    x, p, m, omega = (simbolo(n) for n in ("x", "p", "m", "omega"))
    hq = build_HQ_taylor(modelo_oscilador(), 4)
    esperado = p ** 2 / (2 * m) + m * omega ** 2 * x ** 2 / 2 + G(0, 2) / (2 * m) + m * omega ** 2 * G(2, 0) / 2
    assert hq == esperado


def test_momentos_en_h_clasico():
    modelo = ClassicalModel(nombre="malo", pares=(("x", "p"),), hamiltoniano=G(2, 0))
    with pytest.raises(HamiltonianoNoSoportadoError):
        build_HQ_taylor(modelo, 2)


def test_potencia_negativa_no_admitida():
    x = simbolo("x")
    modelo = ClassicalModel(nombre="malo", pares=(("x", "p"),), hamiltoniano=1 / x)
    with pytest.raises(HamiltonianoNoSoportadoError):
        modelo.validar()


def test_modelo_desconocido():
    with pytest.raises(ValueError):
        obtener_modelo("helio")


class TestEvaluacion:

    parametros = {"m": 1.0, "k": 2.0}

    def test_hq_numerico(self):
        estado = estado_hidrogeno(r=1.0, p_r=1.0, p_theta=1.0, momentos={"G_0_2_0_0": 0.01, "G_0_0_0_2": 0.01})
        valor = evaluate(build_HQ_hydrogen(None, None, 2), estado, hbar=1.0, parametros=self.parametros)
        assert valor == pytest.approx(-0.99)

    def test_orbita_circular(self):
        estado = estado_hidrogeno(r=1.0, p_r=0.0, p_theta=1.0)
        valor = evaluate(modelo_hidrogeno().hamiltoniano, estado, hbar=1.0, parametros={"m": 1.0, "k": 1.0})
        assert valor == pytest.approx(-0.5)

    def test_singularidad(self):
        estado = estado_hidrogeno(r=1e-9)
        with pytest.raises(SingularidadError):
            evaluate(modelo_hidrogeno().hamiltoniano, estado, hbar=1.0, parametros=self.parametros)
