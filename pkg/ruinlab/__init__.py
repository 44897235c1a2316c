"""
ruinlab: probabilidad de ruina en el modelo de Sparre Andersen con inversiones arriesgadas
"""

__version__ = "1.0.0"
