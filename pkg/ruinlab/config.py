"""
Configuración global de ruinlab: valores por defecto del motor y del registro de corridas
"""

import os

# Esquema del archivo de experimento
SCHEMA_VERSION = 1

# Política de simulación por defecto
DEFAULT_N_SUB = 64  # subpasos por intervalo entre siniestros
DEFAULT_EPS_A = 1e-12  # truncamiento de A_n = M_1...M_n
DEFAULT_N_MAX_CLAIMS = 10**6
DEFAULT_U_MARGIN = 0.0

# Ejecución
DEFAULT_SEED = 20240531
DEFAULT_THREADS = 1
DEFAULT_N_TRIALS = 10_000
DEFAULT_N_YINF = 10_000
DEFAULT_U_GRID = (1.0, 2.0, 5.0, 10.0, 20.0)

# Rejilla de r para Ḡ*, en unidades del tiempo medio entre siniestros
DEFAULT_R_GRID_FACTORS = (0.0, 0.25, 0.5, 1.0, 2.0, 5.0)

# Estadística
CONFIDENCE = 0.95
KS_LEVEL = 0.01
CENSORED_FLAG_FRACTION = 0.01

# Solver de β
BETA_TOL = 1e-12
BETA_MAX_ITER = 200
BETA_Q_START = 1e-6
BETA_Q_CAP = 2.0**10
INTERIOR_MARGIN = 1e-3  # δ de la verificación de interioridad
UNIT_MEAN_MIN_N = 10_000  # tamaño mínimo para E[M^β] = 1

# Cuadratura de momentos exponenciales
QUAD_EPSABS = 1e-12

# Registro de corridas (SQLite). En producción se puede apuntar a otra base con RUINLAB_LEDGER_URL
LEDGER_FILENAME = "ruinlab.db"
LEDGER_URL = os.getenv("RUINLAB_LEDGER_URL")

LOG_LEVEL = os.getenv("RUINLAB_LOG_LEVEL", "INFO")
