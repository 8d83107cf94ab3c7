from .generators import erdos_renyi as erdos_renyi
from .generators import heterogeneous as heterogeneous
from .metrics import nmae as nmae
from .metrics import nrmse as nrmse
from .report import format_report as format_report
from .report import write_report as write_report
from .simulation import ReportRow as ReportRow
from .simulation import SimulationSpec as SimulationSpec
from .simulation import load_simulation_spec as load_simulation_spec
from .simulation import run_simulation as run_simulation
