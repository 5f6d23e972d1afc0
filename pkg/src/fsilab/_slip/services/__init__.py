from .executor import ExecutorService
from .output import OutputService
