from contextlib import contextmanager
import logging
import os

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, sessionmaker

from ..config import LEDGER_FILENAME, LEDGER_URL

logger = logging.getLogger(__name__)

SessionLocal = sessionmaker(autocommit=False, autoflush=False)

Base = declarative_base()


def ledger_url(out_dir: str) -> str:
    """URL del registro: RUINLAB_LEDGER_URL o un SQLite dentro del directorio de salida"""
    if LEDGER_URL:
        return LEDGER_URL
    return f"sqlite:///{os.path.join(os.path.abspath(out_dir), LEDGER_FILENAME)}"


def make_engine(url: str) -> Engine:
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    return create_engine(url, connect_args=connect_args)


@contextmanager
def get_db(engine: Engine):
    db = SessionLocal(bind=engine)
    try:
        yield db
    finally:
        db.close()


# Importar todos los modelos para que se registren con Base
from .corrida import Corrida  # noqa: E402
from .estimacion import Estimacion  # noqa: E402
