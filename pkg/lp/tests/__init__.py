from .test_problem import *
from .test_simplex import *
from .test_warm_start import *
