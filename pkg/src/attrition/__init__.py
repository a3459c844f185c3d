"""Employee attrition decision support: risk scoring, tenure outlook,
per-employee drivers, workforce EDA, and candidate screening.
"""

from .errors import AttritionError, DataError, ModelError, SchemaError

__version__ = "0.1.0"

__all__ = [
    "AttritionError", "SchemaError", "DataError", "ModelError",
    "__version__",
]
