"""MiniFrob: exact Frobenius structures from flat pencils of metrics."""

__version__ = "0.1.0"

from .testing import RingLaws  # type: ignore # noqa: F401,F403
from .coefficients import *  # noqa: F401,F403
from .degrees import *  # noqa: F401,F403
from .graded_poly import *  # noqa: F401,F403
from .tensor_data import *  # noqa: F401,F403
from .tensor_ops import *  # noqa: F401,F403
from .linalg import *  # noqa: F401,F403
from .checks import *  # noqa: F401,F403
from .sampling import *  # noqa: F401,F403
from .pencil import *  # noqa: F401,F403
from .frobenius import *  # noqa: F401,F403
from .instances import *  # noqa: F401,F403
from .codec import *  # noqa: F401,F403
from .pipeline import *  # noqa: F401,F403
from . import operators  # noqa: F401,F403
