"""Non-proper quadrangulation of simple polygons with bounded feature-size loss."""
from .errors import MfsquadError
from .geom import Point, Polygon
from .mesher import Mesh, quadrangulate
from .metrics import diameter, measure, min_feature_size, spread
from .pslg import Drawing, validate

__version__ = "0.1.0"

__all__ = ["Drawing", "Mesh", "MfsquadError", "Point", "Polygon", "diameter", "measure",
           "min_feature_size", "quadrangulate", "spread", "validate", "__version__"]
