"""
Tests del motor de corchetes entre momentos
"""
from fractions import Fraction
from itertools import product

import pytest

from app.excepciones import ConfiguracionInvalidaError, OrdenInvalidoError
from app.models.expresiones import G, SymbolicExpression, simbolo
from app.models.momentos import MomentIndex, enumerate_moments
from app.services.corchetes_service import (
    CorchetesService,
    NormalizacionCorchete,
    binomial,
    bracket_moments,
    consistencia_un_grado,
    k_coefficient_1dof,
    kcal_coefficient,
)


class TestCoeficientes:

    def test_binomial_fuera_de_rango(self):
        assert binomial(3, -1) == 0
        assert binomial(2, 3) == 0
        assert binomial(4, 2) == 6

    def test_kcal_un_termino(self):
        assert kcal_coefficient(1, 1, [1], [2], [0], [0], [2]) == Fraction(4)

    def test_k_un_grado(self):
        # solo s = 1 contribuye
        assert k_coefficient_1dof(1, 2, 0, 0, 2) == Fraction(-4)

    def test_n_par_invalido(self):
        with pytest.raises(OrdenInvalidoError):
            k_coefficient_1dof(2, 1, 1, 1, 1)

    def test_configuracion_invalida(self):
        with pytest.raises(ConfiguracionInvalidaError):
            kcal_coefficient(1, 1, [2], [2], [0], [0], [2])
        with pytest.raises(ConfiguracionInvalidaError):
            kcal_coefficient(1, 0, [1], [2], [0], [0], [2])

    def test_consistencia_un_grado(self):
        assert consistencia_un_grado(4) == []


class TestCorcheteMomentos:

    def test_varianzas(self):
        A, B = MomentIndex.de(2, 0), MomentIndex.de(0, 2)
        assert bracket_moments(A, B) == G(1, 1) * -4

    def test_diferencia_de_normalizaciones(self):
        A, B = MomentIndex.de(2, 1), MomentIndex.de(1, 2)
        moyal = bracket_moments(A, B, NormalizacionCorchete.MOYAL)
        multigrado = bracket_moments(A, B, NormalizacionCorchete.MULTIGRADO)
        assert moyal - multigrado == SymbolicExpression.potencia_hbar(2) * Fraction(-1, 2)

    @pytest.mark.parametrize("normalizacion", list(NormalizacionCorchete))
    def test_coinciden_en_orden_dos(self, normalizacion):
        indices = enumerate_moments(2, 2)
        for A, B in product(indices, repeat=2):
            assert bracket_moments(A, B, normalizacion) == bracket_moments(A, B, NormalizacionCorchete.MOYAL)

    @pytest.mark.parametrize("normalizacion", list(NormalizacionCorchete))
    def test_antisimetria_un_grado(self, normalizacion):
        indices = enumerate_moments(1, 5)
        for A, B in product(indices, repeat=2):
            assert bracket_moments(A, B, normalizacion) == -bracket_moments(B, A, normalizacion)

    @pytest.mark.parametrize("normalizacion", list(NormalizacionCorchete))
    def test_antisimetria_dos_grados(self, normalizacion):
        indices = enumerate_moments(2, 3)
        for A, B in product(indices, repeat=2):
            assert bracket_moments(A, B, normalizacion) == -bracket_moments(B, A, normalizacion)

    def test_solo_potencias_pares_de_hbar(self):
        for A, B in product(enumerate_moments(1, 4), repeat=2):
            for termino in bracket_moments(A, B, NormalizacionCorchete.MOYAL).terminos:
                assert termino.hbar % 2 == 0
                assert not termino.imaginario

    def test_grados_distintos(self):
        with pytest.raises(ValueError):
            bracket_moments(MomentIndex.de(2, 0), MomentIndex.de(2, 0, 0, 0))


class TestServicio:

    @pytest.fixture
    def service(self):
        return CorchetesService([("r", "p_r"), ("theta", "p_theta")])

    def test_canonicos(self, service):
        assert service.bracket_with_classical("r", "p_r") == 1
        assert service.bracket_with_classical("p_r", "r") == -1
        assert service.bracket_with_classical("r", "p_theta").es_cero()
        assert service.bracket_with_classical("theta", MomentIndex.de(2, 0, 0, 0)).es_cero()

    def test_variable_desconocida(self, service):
        with pytest.raises(ValueError):
            service.bracket_with_classical("x", "p_r")

    def test_leibniz(self, service):
        r, p_r = simbolo("r"), simbolo("p_r")
        # {r, p_r²/2} = p_r
        assert service.bracket_functions(r, p_r ** 2 / 2) == p_r
        # {p_r, 1/r} = 1/r²
        assert service.bracket_functions(p_r, 1 / r) == 1 / r ** 2

    def test_normalizacion_por_defecto(self, service):
        assert service.normalizacion == NormalizacionCorchete.MULTIGRADO
        assert service.k == 2

    def test_jacobi_moyal(self):
        reporte = CorchetesService([("x", "p")], NormalizacionCorchete.MOYAL).jacobi_report(orden_maximo=3)
        assert reporte.exacto
        assert reporte.ternas_verificadas == 84
