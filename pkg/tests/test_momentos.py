"""
Tests de multi-índices, estados y expresiones simbólicas
"""
from fractions import Fraction

import pytest

from app.excepciones import EstadoIncompletoError, TruncamientoInvalidoError
from app.models.expresiones import G, SymbolicExpression, constante, simbolo
from app.models.momentos import MomentIndex, SystemState, enumerate_moments, indices_par, uncertainty_ok


class TestEnumeracion:

    def test_un_grado_orden_dos(self):
        assert enumerate_moments(1, 2) == [
            MomentIndex.de(2, 0),
            MomentIndex.de(1, 1),
            MomentIndex.de(0, 2),
        ]

    @pytest.mark.parametrize("k, N, esperado", [(1, 4, 12), (2, 2, 10), (2, 3, 30), (2, 4, 65)])
    def test_cantidad(self, k, N, esperado):
        assert len(enumerate_moments(k, N)) == esperado

    def test_orden_graduado(self):
        indices = enumerate_moments(2, 3)
        ordenes = [idx.orden for idx in indices]
        assert ordenes == sorted(ordenes)
        assert indices[0] == MomentIndex.de(2, 0, 0, 0)
        assert len(set(indices)) == len(indices)

    def test_truncamiento_invalido(self):
        with pytest.raises(TruncamientoInvalidoError):
            enumerate_moments(2, 1)


class TestMomentIndex:

    def test_nombre(self):
        idx = MomentIndex.desde_nombre("G_1_0_0_1")
        assert idx == MomentIndex.de(1, 0, 0, 1)
        assert idx.nombre == "G_1_0_0_1"
        assert idx.k == 2
        assert idx.orden == 2

    @pytest.mark.parametrize("nombre", ["X_1_0", "G_1_a", "G_1_0_2", "G"])
    def test_nombre_invalido(self, nombre):
        with pytest.raises(ValueError):
            MomentIndex.desde_nombre(nombre)

    def test_diagonal(self):
        assert MomentIndex.de(2, 0, 0, 0).es_diagonal
        assert MomentIndex.de(0, 0, 0, 2).es_diagonal
        assert not MomentIndex.de(1, 1, 0, 0).es_diagonal
        assert not MomentIndex.de(3, 0, 0, 0).es_diagonal

    def test_indices_negativos(self):
        with pytest.raises(ValueError):
            MomentIndex.de(2, -1)


class TestIncertidumbre:

    def _estado(self, g20, g11, g02):
        return SystemState(
            t=0.0,
            clasicas={"x": 0.0, "p": 0.0},
            momentos={MomentIndex.de(2, 0): g20, MomentIndex.de(1, 1): g11, MomentIndex.de(0, 2): g02},
        )

    def test_margen_positivo(self):
        ok, margen = uncertainty_ok(self._estado(0.01, 0.0, 0.01), 0, hbar=0.01, k=1)
        assert ok
        assert margen == pytest.approx(7.5e-5)

    def test_saturado(self):
        sigma, hbar = 0.3, 1.0
        ok, margen = uncertainty_ok(
            self._estado(sigma, 0.0, hbar ** 2 / (4 * sigma)), 0, hbar, k=1, tolerancia=1e-12
        )
        assert ok
        assert margen == pytest.approx(0.0, abs=1e-15)

    def test_violado(self):
        ok, margen = uncertainty_ok(self._estado(0.01, 0.0, 0.01), 0, hbar=1.0, k=1)
        assert not ok
        assert margen < 0

    def test_momentos_faltantes(self):
        estado = SystemState(t=0.0, clasicas={}, momentos={MomentIndex.de(2, 0): 1.0})
        with pytest.raises(EstadoIncompletoError):
            uncertainty_ok(estado, 0, 1.0, k=1)

    def test_grados_de_libertad_del_estado(self):
        estado = self._estado(0.01, 0.0, 0.01)
        assert estado.k == 1
        assert uncertainty_ok(estado, 0, hbar=0.01) == uncertainty_ok(estado, 0, hbar=0.01, k=1)

    def test_par_angular_sin_k_explicito(self):
        estado = SystemState(
            t=0.0,
            clasicas={},
            momentos={
                MomentIndex.de(2, 0, 0, 0): 1.0, MomentIndex.de(1, 1, 0, 0): 0.0, MomentIndex.de(0, 2, 0, 0): 1.0,
                MomentIndex.de(0, 0, 2, 0): 0.5, MomentIndex.de(0, 0, 1, 1): 0.0, MomentIndex.de(0, 0, 0, 2): 0.5,
            },
        )
        assert estado.k == 2
        ok, margen = uncertainty_ok(estado, 1, hbar=1.0)
        assert ok
        assert margen == pytest.approx(0.0)

    def test_estado_sin_momentos(self):
        estado = SystemState(t=0.0, clasicas={"x": 0.0})
        assert estado.k is None
        with pytest.raises(EstadoIncompletoError):
            uncertainty_ok(estado, 0, hbar=1.0)

    def test_indices_par_angular(self):
        assert indices_par(2, 1) == (
            MomentIndex.de(0, 0, 2, 0),
            MomentIndex.de(0, 0, 1, 1),
            MomentIndex.de(0, 0, 0, 2),
        )

    def test_validar_varianza_negativa(self):
        estado = SystemState(t=0.0, clasicas={}, momentos={MomentIndex.de(2, 0, 0, 0): -1.0})
        with pytest.raises(ValueError):
            estado.validar(2)


class TestExpresiones:

    def test_fusion_de_terminos(self):
        r = simbolo("r")
        expr = r * 2 + r * 3 - 5 * r
        assert expr.es_cero()

    def test_potencias_negativas(self):
        r = simbolo("r")
        assert (r ** 3 / r ** 3) == 1
        assert (1 / r).derivar_simbolo("r") == -1 / r ** 2

    def test_coeficientes_exactos(self):
        expr = G(2, 0) * Fraction(1, 3) + G(2, 0) * Fraction(2, 3)
        assert expr == G(2, 0)
        with pytest.raises(TypeError):
            G(2, 0) * 0.5

    def test_ordenes_bajos(self):
        assert G(0, 0) == 1
        assert G(1, 0).es_cero()

    def test_division_por_polinomio(self):
        with pytest.raises(ZeroDivisionError):
            constante(1) / (simbolo("r") + 1)

    def test_truncar(self):
        expr = G(2, 0) + G(3, 0) + G(2, 0) * G(2, 0)
        assert expr.truncar(2) == G(2, 0) + G(2, 0) * G(2, 0)

    def test_imaginarios(self):
        ih = SymbolicExpression.i_hbar()
        assert (ih * ih) == -SymbolicExpression.potencia_hbar(2)
        assert (ih * G(2, 0)).tiene_imaginarios()
        assert (ih + G(2, 0)).parte_real() == G(2, 0)

    def test_evaluar(self):
        expr = simbolo("p_theta") ** 2 / (2 * simbolo("m") * simbolo("r") ** 2) + G(2, 0)
        valor = expr.evaluar({"p_theta": 1.0, "m": 1.0, "r": 2.0, "G_2_0": 0.5}, hbar=1.0)
        assert valor == pytest.approx(0.625)
        with pytest.raises(EstadoIncompletoError):
            expr.evaluar({"p_theta": 1.0, "m": 1.0, "r": 2.0}, hbar=1.0)

    def test_anular(self):
        expr = simbolo("p_theta") * G(1, 0, 0, 1) + G(2, 0, 0, 0)
        assert expr.anular(simbolos=("p_theta",)) == G(2, 0, 0, 0)
        assert expr.anular(momentos=(MomentIndex.de(2, 0, 0, 0),)) == simbolo("p_theta") * G(1, 0, 0, 1)
        with pytest.raises(ZeroDivisionError):
            (1 / simbolo("r")).anular(simbolos=("r",))

    def test_texto_determinista(self):
        a = G(2, 0) + simbolo("r") * 3
        b = simbolo("r") * 3 + G(2, 0)
        assert str(a) == str(b)
        assert hash(a) == hash(b)
