"""Report loading module"""
from .processor import (
    ReportLoader,
    ReportAggregator,
    load_and_process_all_reports,
)

__all__ = [
    'ReportLoader',
    'ReportAggregator',
    'load_and_process_all_reports',
]
