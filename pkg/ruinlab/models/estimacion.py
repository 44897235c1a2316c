from sqlalchemy import Column, Float, ForeignKey, Integer
from sqlalchemy.orm import relationship

from . import Base


class Estimacion(Base):
    __tablename__ = "estimates"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("runs.id"), nullable=False, index=True)
    u = Column(Float, nullable=False)
    r = Column(Float, nullable=False, default=0.0)
    n = Column(Integer, nullable=False)
    k_ruin = Column(Integer, nullable=False)
    k_cens = Column(Integer, nullable=False, default=0)
    p_low = Column(Float, nullable=False)
    p_high = Column(Float, nullable=False)

    # Relaciones
    corrida = relationship("Corrida", back_populates="estimaciones")

    def __repr__(self):
        return f"<Estimacion(run_id={self.run_id}, u={self.u}, p_low={self.p_low}, p_high={self.p_high})>"
