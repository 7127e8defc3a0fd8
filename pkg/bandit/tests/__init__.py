from .test_config import *
from .test_selection import *
from .test_training import *
from .test_ucb import *
