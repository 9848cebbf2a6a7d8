"""Visualization components module"""
from .charts import (
    ConvergenceCharts,
    ProfileCharts,
)

__all__ = [
    'ConvergenceCharts',
    'ProfileCharts',
]
