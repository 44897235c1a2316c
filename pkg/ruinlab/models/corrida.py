from sqlalchemy import Column, DateTime, Integer, JSON, String
from sqlalchemy.orm import relationship
from sqlalchemy.sql import func

from . import Base


class Corrida(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)
    command = Column(String, nullable=False, index=True)
    scenario = Column(String, nullable=True)
    seed = Column(Integer, nullable=False)
    threads = Column(Integer, nullable=False, default=1)
    status = Column(String, nullable=False)  # ok / invalid / inconclusive / error
    exit_code = Column(Integer, nullable=False)
    summary = Column(JSON, nullable=True)
    created_at = Column(DateTime(timezone=True), server_default=func.now())

    # Relaciones
    estimaciones = relationship("Estimacion", back_populates="corrida", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<Corrida(id={self.id}, command='{self.command}', status='{self.status}', seed={self.seed})>"
