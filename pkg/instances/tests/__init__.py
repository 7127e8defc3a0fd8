from .test_problem import *
from .test_generators import *
from .test_io import *
from .test_oracle import *
