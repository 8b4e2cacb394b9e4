"""
Tests del integrador numérico y de los monitores de trayectoria
"""
import numpy as np
import pytest

from app.excepciones import EstadoIncompletoError, SingularidadError
from app.models.expresiones import G, SymbolicExpression, simbolo
from app.models.momentos import SystemState
from app.schemas.schemas_integrador import IntegratorConfig, MetodoIntegracion, MotivoFin
from app.services.escenarios_service import cargar_escenario, estado_inicial
from app.services.integrador_service import (
    PlanEvaluacion,
    compilar_sistema,
    integrate,
    monitor_uncertainty,
    monitor_validity,
    vector_inicial,
)
from tests.conftest import DIRECTORIO_ESCENARIOS, estado_hidrogeno

KEPLER = {"m": 1.0, "k": 1.0}
PLOT3 = {"m": 1.0, "k": 2.0}


def _error_energia(traj) -> float:
    energia = traj.columna("energia")
    return float(np.max(np.abs(energia - energia[0])))


class TestPlan:

    def test_coincide_con_evaluacion_simbolica(self, sistema2):
        estado = estado_hidrogeno(r=1.3, p_r=0.2, theta=0.4, p_theta=0.9, momentos={
            "G_2_0_0_0": 0.01, "G_1_1_0_0": -0.002, "G_0_2_0_0": 0.03, "G_1_0_0_1": 0.004,
        })
        plan = compilar_sistema(sistema2, PLOT3, hbar=1.0)
        numerico = plan.evaluar(vector_inicial(sistema2, estado))
        valores = dict(estado.valores(), **PLOT3)
        simbolico = [sistema2.rhs[v].evaluar(valores, 1.0) for v in sistema2.variables]
        np.testing.assert_allclose(numerico, simbolico, rtol=1e-13, atol=1e-15)

    def test_lote(self):
        r, l, m = simbolo("r"), simbolo("p_theta"), simbolo("m")
        plan = PlanEvaluacion([l ** 2 / (m * r ** 2), G(2, 0, 0, 0) * 3], ("r", "p_theta", "G_2_0_0_0"), {"m": 2.0})
        lote = np.array([[2.0, 3.0, 0.1], [1.0, 1.0, 0.0]])
        np.testing.assert_allclose(plan.evaluar(lote), [[1.125, 0.3], [0.5, 0.0]])
        assert plan.singulares == ("r",)

    def test_simbolo_faltante(self):
        with pytest.raises(EstadoIncompletoError):
            PlanEvaluacion([simbolo("k") / simbolo("r")], ("r",), {})

    def test_imaginarios_excluidos(self):
        plan = PlanEvaluacion([SymbolicExpression.i_hbar() * G(2, 0, 0, 0) + simbolo("r")], ("r",))
        assert plan.imaginarios_excluidos == 1
        assert plan.evaluar(np.array([2.0]))[0] == 2.0


class TestKepler:

    @pytest.mark.parametrize("metodo", list(MetodoIntegracion))
    def test_orbita_circular(self, kepler, metodo):
        # 50 períodos de 2π
        t_end = 100 * np.pi
        config = IntegratorConfig(metodo=metodo, t_end=t_end, paso_inicial=0.01)
        traj = integrate(kepler, estado_hidrogeno(r=1.0, p_r=0.0, p_theta=1.0), config, hbar=1.0, parametros=KEPLER)
        assert traj.motivo_fin == MotivoFin.T_FIN
        assert traj.t_final == t_end
        np.testing.assert_allclose(traj.columna("r"), 1.0, rtol=0, atol=1e-10)
        np.testing.assert_allclose(traj.columna("p_r"), 0.0, rtol=0, atol=1e-10)
        np.testing.assert_allclose(traj.columna("theta"), traj.tiempos, rtol=1e-9)

    def test_elipse_conserva_energia(self, kepler):
        config = IntegratorConfig(t_end=50.0, atol=1e-12, rtol=1e-12)
        traj = integrate(kepler, estado_hidrogeno(r=1.0, p_r=0.3, p_theta=1.0), config, parametros=KEPLER)
        assert traj.motivo_fin == MotivoFin.T_FIN
        assert traj.columna("energia")[0] == pytest.approx(-0.455)
        assert _error_energia(traj) / 0.455 <= 1e-9
        assert np.all(np.diff(traj.tiempos) > 0)

    def test_convergencia_rk4(self, kepler):
        inicial = estado_hidrogeno(r=1.0, p_r=0.3, p_theta=1.0)
        errores = []
        for paso in (0.02, 0.01):
            config = IntegratorConfig(metodo=MetodoIntegracion.RK4, paso_inicial=paso, t_end=10.0)
            traj = integrate(kepler, inicial, config, parametros=KEPLER)
            assert traj.t_final == 10.0
            errores.append(_error_energia(traj))
        assert 14.0 <= errores[0] / errores[1] <= 18.0

    def test_caida_radial_termina_en_r_min(self, kepler):
        config = IntegratorConfig(t_end=5.0, r_min=1e-3)
        traj = integrate(kepler, estado_hidrogeno(r=1.0, p_r=0.0, p_theta=0.0), config, parametros=KEPLER)
        assert traj.motivo_fin == MotivoFin.R_MIN
        assert traj.t_final < 5.0

    def test_estado_inicial_singular(self, kepler):
        config = IntegratorConfig(t_end=1.0)
        with pytest.raises(SingularidadError):
            integrate(kepler, estado_hidrogeno(r=1e-7), config, parametros=KEPLER)

    def test_estado_incompleto(self, kepler):
        estado = SystemState(t=0.0, clasicas={"r": 1.0, "p_r": 0.0})
        with pytest.raises(EstadoIncompletoError):
            integrate(kepler, estado, IntegratorConfig(t_end=1.0), parametros=KEPLER)


class TestSegundoOrden:

    @pytest.fixture(scope="class")
    def inicial(self):
        return estado_hidrogeno(r=1.0, p_r=1.0, theta=np.pi, p_theta=1.0, momentos={
            "G_2_0_0_0": 0.01, "G_0_2_0_0": 0.01, "G_0_0_2_0": 0.01, "G_0_0_0_2": 0.01,
        })

    def test_conservadas_bit_a_bit(self, sistema2, inicial):
        for metodo in MetodoIntegracion:
            config = IntegratorConfig(metodo=metodo, t_end=2.0)
            traj = integrate(sistema2, inicial, config, hbar=0.02, parametros=PLOT3)
            assert np.all(traj.columna("p_theta") == 1.0)
            assert np.all(traj.columna("G_0_0_0_2") == 0.01)

    def test_adaptativo_y_paso_fijo(self, sistema2):
        escenario = cargar_escenario(DIRECTORIO_ESCENARIOS / "plot3.env")
        inicial = estado_inicial(escenario)
        hbar, tol = escenario.hbar_efectivo, escenario.tol

        exploratoria = integrate(
            sistema2, inicial, escenario.con_cambios(t_fin=3.0).config_integrador(),
            hbar=hbar, parametros=escenario.parametros,
        )
        ventana = monitor_validity(exploratoria)
        assert not ventana.vacia
        assert ventana.t_fin > 0.5

        adaptativo = integrate(
            sistema2, inicial, escenario.con_cambios(t_fin=ventana.t_fin).config_integrador(),
            hbar=hbar, parametros=escenario.parametros,
        )
        fijo = integrate(
            sistema2, inicial,
            IntegratorConfig(metodo=MetodoIntegracion.RK4, paso_inicial=5e-4, t_end=ventana.t_fin),
            hbar=hbar, parametros=escenario.parametros,
        )
        assert adaptativo.motivo_fin == fijo.motivo_fin == MotivoFin.T_FIN
        assert adaptativo.t_final == fijo.t_final == ventana.t_fin
        np.testing.assert_allclose(
            adaptativo.matriz_estados()[-1], fijo.matriz_estados()[-1], rtol=10 * tol, atol=10 * tol
        )

    @pytest.mark.parametrize("metodo", list(MetodoIntegracion))
    def test_divergencia_detiene_sin_falla(self, sistema2, inicial, metodo):
        config = IntegratorConfig(metodo=metodo, t_end=2.0, cota_momentos=0.005)
        traj = integrate(sistema2, inicial, config, hbar=0.02, parametros=PLOT3)
        assert traj.motivo_fin == MotivoFin.DIVERGENCIA
        assert traj.motivo_fin.es_normal
        assert len(traj) == 2
        assert traj.t_final < 2.0

    def test_cota_por_defecto_no_afecta_corridas_cortas(self, sistema2, inicial):
        traj = integrate(sistema2, inicial, IntegratorConfig(t_end=1.0), hbar=0.02, parametros=PLOT3)
        assert traj.motivo_fin == MotivoFin.T_FIN
        assert np.max(np.abs(traj.datos.filter(like="G_").to_numpy())) < 1e6

    def test_diagnosticos(self, sistema2, inicial):
        traj = integrate(sistema2, inicial, IntegratorConfig(t_end=0.5), hbar=0.02, parametros=PLOT3)
        for columna in ("energia", "margen_r", "validez_r", "validez_p_r", "razon_r", "margen_theta"):
            assert columna in traj.datos
            assert np.all(np.isfinite(traj.columna(columna)))
        assert traj.columna("validez_r")[0] == pytest.approx(0.1)
        assert traj.columna("razon_r")[0] == pytest.approx(1.0)
        assert len(traj.samples) == len(traj)
        assert traj.samples[0].clasicas["theta"] == pytest.approx(np.pi)

    def test_remuestreo(self, sistema2, inicial):
        config = IntegratorConfig(t_end=1.0, remuestreo=101)
        traj = integrate(sistema2, inicial, config, hbar=0.02, parametros=PLOT3)
        assert len(traj) == 101
        np.testing.assert_allclose(traj.tiempos, np.linspace(0.0, 1.0, 101))


class TestMonitores:

    def test_clasico_ventana_completa(self, kepler):
        traj = integrate(
            kepler, estado_hidrogeno(r=1.0, p_r=0.0, p_theta=1.0), IntegratorConfig(t_end=3.0), parametros=KEPLER
        )
        ventana = monitor_validity(traj)
        assert not ventana.vacia
        assert ventana.t_fin == traj.t_final
        assert ventana.indice_violacion is None

    def test_violacion_inmediata(self, sistema2):
        inicial = estado_hidrogeno(r=1.0, p_r=0.0, p_theta=1.0, momentos={"G_2_0_0_0": 1.0})
        traj = integrate(sistema2, inicial, IntegratorConfig(t_end=0.01), parametros=KEPLER)
        ventana = monitor_validity(traj, threshold=0.5)
        assert ventana.vacia
        assert ventana.duracion == 0.0
        assert ventana.indice_violacion == 0

    def test_incertidumbre_clasica(self, kepler):
        traj = integrate(
            kepler, estado_hidrogeno(r=1.0, p_r=0.0, p_theta=1.0), IntegratorConfig(t_end=1.0),
            hbar=1.0, parametros=KEPLER,
        )
        margenes, reporte = monitor_uncertainty(traj)
        assert reporte.margen_inicial == pytest.approx(-0.25)
        assert reporte.primera_violacion == 0.0
        assert len(margenes) == len(traj)

    def test_incertidumbre_saturada(self, sistema2):
        hbar, sigma2 = 0.02, 0.01
        inicial = estado_hidrogeno(r=1.0, p_r=1.0, p_theta=1.0, momentos={
            "G_2_0_0_0": sigma2, "G_0_2_0_0": hbar ** 2 / (4 * sigma2),
        })
        traj = integrate(sistema2, inicial, IntegratorConfig(t_end=0.1), hbar=hbar, parametros=PLOT3)
        _, reporte = monitor_uncertainty(traj)
        assert reporte.margen_inicial == pytest.approx(0.0, abs=1e-18)


@pytest.mark.parametrize("motivo, normal", [
    (MotivoFin.T_FIN, True),
    (MotivoFin.DIVERGENCIA, True),
    (MotivoFin.R_MIN, False),
    (MotivoFin.PASO_MINIMO, False),
    (MotivoFin.NO_FINITO, False),
    (MotivoFin.MAX_PASOS, False),
])
def test_motivo_normal(motivo, normal):
    assert motivo.es_normal is normal


def test_configuracion_invalida():
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=1.0, paso_inicial=0.5, paso_max=0.1)
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=-1.0)
