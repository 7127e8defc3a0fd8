from .test_config import *
from .test_cuts import *
from .test_separators import *
