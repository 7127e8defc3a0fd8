from .test_decomposition import *
from .test_restriction import *
from .test_table import *
