"""
Tests de escenarios: carga, condiciones iniciales, corridas y barridos
"""
import json

import numpy as np
import pytest

from app.config import settings
from app.excepciones import ArchivoEscenarioError, EscenarioIncorrectoError, EstadoInicialRechazadoError
from app.models.momentos import MomentIndex
from app.schemas.schemas_escenario import ModoMomentos, Scenario
from app.schemas.schemas_integrador import MotivoFin
from app.services.escenarios_service import (
    build_initial_conditions,
    cargar_escenario,
    ejecutar_y_guardar,
    escenario_desde_manifiesto,
    run_2d,
    run_l0,
    sweep,
)
from app.utils.salida import sha256_archivo

CLASICAS = {"r": 1.0, "p_r": 1.0, "theta": 0.0, "p_theta": 1.0}


def _momento(estado, *indices):
    return estado.momento(MomentIndex.de(*indices))


class TestCarga:

    def test_plot3(self, escenarios):
        escenario = cargar_escenario(escenarios / "plot3.env")
        assert escenario.orden == 2
        assert (escenario.m, escenario.k, escenario.l) == (1.0, 2.0, 1.0)
        assert escenario.hbar_efectivo == pytest.approx(0.02)
        assert escenario.escalera == [1e-3, 1e-4, 1e-5]
        assert escenario.modo_momentos == ModoMomentos.DIAGONALES

    def test_momentos_extra(self, escenarios):
        escenario = cargar_escenario(escenarios / "l0.env")
        assert escenario.momentos_extra == {"G_1_0_0_1": 0.01}

    @pytest.mark.parametrize("nombre", ["plot3", "l0", "orbita", "plot8", "escalera", "kepler"])
    def test_todos_validan(self, escenarios, nombre):
        assert cargar_escenario(escenarios / f"{nombre}.env").nombre == nombre

    def test_clave_desconocida(self, tmp_path):
        ruta = tmp_path / "malo.env"
        ruta.write_text("NOMBRE=x\nR0=1\nT_FIN=1\nFOO=3\n")
        with pytest.raises(ArchivoEscenarioError) as error:
            cargar_escenario(ruta)
        assert any(d.startswith("línea 4: FOO") for d in error.value.diagnosticos)

    def test_valor_mal_tipado(self, tmp_path):
        ruta = tmp_path / "malo.env"
        ruta.write_text("# comentario\nNOMBRE=x\nORDEN=dos\nR0=1\nT_FIN=1\n")
        with pytest.raises(ArchivoEscenarioError) as error:
            cargar_escenario(ruta)
        assert any(d.startswith("línea 3: ORDEN") for d in error.value.diagnosticos)

    def test_momento_no_numerico(self, tmp_path):
        ruta = tmp_path / "malo.env"
        ruta.write_text("NOMBRE=x\nR0=1\nT_FIN=1\nG_1_0_0_1=mucho\n")
        with pytest.raises(ArchivoEscenarioError):
            cargar_escenario(ruta)

    def test_hbar_auto_sin_dispersion(self, tmp_path):
        ruta = tmp_path / "malo.env"
        ruta.write_text("NOMBRE=x\nR0=1\nT_FIN=1\nHBAR=auto\n")
        with pytest.raises(ArchivoEscenarioError):
            cargar_escenario(ruta)

    def test_archivo_inexistente(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            cargar_escenario(tmp_path / "no_existe.env")

    def test_con_cambios(self, escenarios):
        escenario = cargar_escenario(escenarios / "plot3.env")
        cambiado = escenario.con_cambios(t_fin=2.0, orden=None)
        assert cambiado.t_fin == 2.0
        assert cambiado.orden == escenario.orden
        assert escenario.t_fin == 10.0


class TestCondicionesIniciales:

    def test_saturacion(self):
        estado = build_initial_conditions(CLASICAS, 2, hbar=1.0, sigma_r=0.01, sigma_theta=0.1, saturate=True)
        assert _momento(estado, 2, 0, 0, 0) == pytest.approx(1e-4)
        assert _momento(estado, 0, 2, 0, 0) == pytest.approx(2500.0)
        assert _momento(estado, 1, 1, 0, 0) == 0.0
        g20, g02 = _momento(estado, 2, 0, 0, 0), _momento(estado, 0, 2, 0, 0)
        assert g20 * g02 - 0.25 == pytest.approx(0.0, abs=1e-12)

    def test_dispersion_no_fisica_aceptada(self):
        estado = build_initial_conditions(CLASICAS, 2, hbar=1.0, dispersion=0.01)
        assert _momento(estado, 2, 0, 0, 0) == 0.01
        assert _momento(estado, 0, 0, 0, 2) == 0.01
        assert _momento(estado, 1, 1, 0, 0) == 0.0

    def test_todos_los_momentos(self):
        estado = build_initial_conditions(CLASICAS, 3, hbar=1.0, dispersion=0.01, modo=ModoMomentos.TODOS)
        assert all(v == 0.01 for v in estado.momentos.values())
        assert len(estado.momentos) == 30

    def test_sigma_nula_rechazada(self):
        with pytest.raises(EstadoInicialRechazadoError):
            build_initial_conditions(CLASICAS, 2, hbar=1.0, sigma_r=0.0, sigma_theta=0.1, saturate=True, fisico=True)
        with pytest.raises(EstadoInicialRechazadoError):
            build_initial_conditions(CLASICAS, 2, hbar=1.0, sigma_r=0.0, sigma_theta=0.1, fisico=True)

    def test_precedencia(self):
        estado = build_initial_conditions(
            CLASICAS, 2, hbar=0.02, dispersion=0.01, sigma_r=0.2, saturate=True,
            delta_l2=0.5, extra={"G_1_0_0_1": 0.003},
        )
        assert _momento(estado, 2, 0, 0, 0) == pytest.approx(0.04)
        assert _momento(estado, 0, 2, 0, 0) == pytest.approx(0.0004 / 0.16)
        assert _momento(estado, 0, 0, 0, 2) == 0.5
        assert _momento(estado, 1, 0, 0, 1) == 0.003

    def test_clasico(self):
        estado = build_initial_conditions(CLASICAS, 2, hbar=1.0, dispersion=0.01, clasico=True)
        assert all(v == 0.0 for v in estado.momentos.values())

    def test_momento_fuera_de_orden(self):
        with pytest.raises(ValueError):
            build_initial_conditions(CLASICAS, 2, hbar=1.0, extra={"G_2_1_0_0": 0.1})


class TestCorridas:

    def test_l0_induce_movimiento_bidimensional(self, escenarios):
        resultado = run_l0(cargar_escenario(escenarios / "l0.env"))
        reporte = resultado.reporte
        assert reporte.movimiento_2d
        assert reporte.desviacion_theta_maxima > 1e-6
        assert reporte.restriccion_simbolica_nula
        assert reporte.estricto_constante
        assert np.all(resultado.estricta.trayectoria.columna("theta") == 0.0)
        assert np.all(resultado.clasica.trayectoria.columna("theta") == 0.0)

    def test_l0_rechaza_momento_angular(self, escenarios):
        with pytest.raises(EscenarioIncorrectoError):
            run_l0(cargar_escenario(escenarios / "plot3.env"))

    def test_2d_rechaza_l_nulo(self, escenarios):
        with pytest.raises(EscenarioIncorrectoError):
            run_2d(cargar_escenario(escenarios / "l0.env"))

    def test_2d_conserva_momento_angular(self, escenarios):
        escenario = cargar_escenario(escenarios / "plot3.env").con_cambios(t_fin=3.0)
        resultado = run_2d(escenario)
        traj = resultado.corrida.trayectoria
        assert np.all(traj.columna("p_theta") == 1.0)
        assert np.all(traj.columna("G_0_0_0_2") == 0.01)
        assert resultado.reporte.motivo_fin == "t_fin"
        assert resultado.reporte.energia_clasica == pytest.approx(-1.0)
        assert set(resultado.orbita.columns) >= {"x", "y", "x_interior", "x_exterior"}
        assert len(resultado.fase) == len(traj)

    def test_energia_clasica_constante(self, escenarios):
        escenario = cargar_escenario(escenarios / "kepler.env").con_cambios(t_fin=10.0)
        resultado = run_2d(escenario)
        assert resultado.reporte.energia.deriva_relativa < 1e-9


@pytest.mark.lento
class TestEscenariosCompletos:

    def test_plot3_relaja_hacia_circular(self, escenarios):
        reporte = run_2d(cargar_escenario(escenarios / "plot3.env")).reporte
        assert MotivoFin(reporte.motivo_fin).es_normal
        assert 0.8 <= reporte.media_tardia_r <= 1.2
        assert reporte.amplitud_tardia_r < reporte.amplitud_temprana_r

    def test_escalera_ventana_monotona(self, escenarios, tmp_path):
        resumen = sweep(cargar_escenario(escenarios / "escalera.env"), tmp_path, trabajadores=1)
        assert [f.dispersion for f in resumen.filas] == [1e-3, 1e-4, 1e-5]
        assert all(MotivoFin(f.motivo_fin).es_normal for f in resumen.filas)
        assert all(f.ventana_validez > 0 for f in resumen.filas)
        assert resumen.monotona

    def test_plot8_saturado_dentro_de_la_ventana(self, escenarios):
        resultado = run_2d(cargar_escenario(escenarios / "plot8.env"))
        corrida = resultado.corrida
        hbar = corrida.trayectoria.hbar
        holgura = settings.TOLERANCIA_MARGEN * hbar ** 2 / 4
        assert MotivoFin(resultado.reporte.motivo_fin).es_normal
        assert abs(corrida.incertidumbre.margen_inicial) <= holgura

        ventana = corrida.ventana
        assert not ventana.vacia
        en_ventana = corrida.margenes[corrida.margenes.index <= ventana.t_fin]
        assert np.all(en_ventana.to_numpy() >= -holgura)
        violacion = corrida.incertidumbre.primera_violacion
        assert violacion is None or violacion > ventana.t_fin


class TestPersistencia:

    def test_manifiesto_reproducible(self, escenarios, tmp_path):
        escenario = cargar_escenario(escenarios / "l0.env").con_cambios(t_fin=0.5)
        ejecutar_y_guardar(escenario, tmp_path / "a")
        ejecutar_y_guardar(escenario, tmp_path / "b")

        manifiesto = json.loads((tmp_path / "a" / "manifiesto.json").read_text(encoding="utf-8"))
        assert manifiesto["motivo_fin"] == "t_fin"
        assert manifiesto["sumas_verificacion"]["trayectoria.csv"] == sha256_archivo(tmp_path / "a" / "trayectoria.csv")
        assert {"clasica.csv", "estricta.csv", "reporte.json"} <= set(manifiesto["sumas_verificacion"])
        assert sha256_archivo(tmp_path / "a" / "trayectoria.csv") == sha256_archivo(tmp_path / "b" / "trayectoria.csv")

        reconstruido = escenario_desde_manifiesto(tmp_path / "a" / "manifiesto.json")
        assert reconstruido.model_dump() == escenario.model_dump()

    def test_barrido_secuencial(self, escenarios, tmp_path):
        escenario = cargar_escenario(escenarios / "escalera.env").con_cambios(t_fin=1.0)
        resumen = sweep(escenario, tmp_path, trabajadores=1)
        assert [f.dispersion for f in resumen.filas] == [1e-3, 1e-4, 1e-5]
        assert [f.directorio for f in resumen.filas] == ["dispersion_1e-03", "dispersion_1e-04", "dispersion_1e-05"]
        assert [f.hbar for f in resumen.filas] == pytest.approx([2e-3, 2e-4, 2e-5])
        assert (tmp_path / "resumen.csv").is_file()
        assert (tmp_path / "dispersion_1e-04" / "manifiesto.json").is_file()


def test_escenario_requiere_campos():
    with pytest.raises(ValueError):
        Scenario.model_validate({"NOMBRE": "x", "T_FIN": 1.0})
