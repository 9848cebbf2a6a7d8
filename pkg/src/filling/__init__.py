"""Pipe-filling volume and distance budgets"""
from .budget import (
    FillingBudget,
    IteratedBudget,
    ProfileParams,
    heights,
    filling_budget,
    iterated_budget,
)

__all__ = [
    'FillingBudget',
    'IteratedBudget',
    'ProfileParams',
    'heights',
    'filling_budget',
    'iterated_budget',
]
