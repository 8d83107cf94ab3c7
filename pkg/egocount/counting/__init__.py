from .cliques import enumerate_maximal_cliques as enumerate_maximal_cliques
from .egonet import CopyKey as CopyKey
from .egonet import EgonetCount as EgonetCount
from .egonet import RoleDegreeVector as RoleDegreeVector
from .egonet import check_counting_mode as check_counting_mode
from .egonet import count_egonet as count_egonet
from .egonet import role_degrees as role_degrees
from .egonet import unique_copies as unique_copies
from .oracle import DEFAULT_BUDGET as DEFAULT_BUDGET
from .oracle import exact_count as exact_count
from .oracle import search_cost as search_cost
