from datetime import datetime

import pytest

from dslake.lang.ast import GeoBox
from dslake.registry import KnowledgeRegistry
from dslake.times import UTC
from dslake.cyclone.plugin import register_cyclone_domain

# the query sketch exactly as published, misspellings included; the
# cyclone plugin registers cyclon-path/directon as aliases so this exact
# text must tokenize, parse, and validate
FIG5_SCRIPT = """\
area 48.3416,-24.7851 - 66.1605,32.8710
time 01.01.2011 - 31.12.2011

select cyclon-path
         directon north-east
         out(Params[EndTime])

simulate
  with BSM
  semantic_association yes
  in(startTime: EndTime - 48h)
  out(level[440,414])
"""

FIG5_AREA = GeoBox(lat_min=48.3416, lon_min=-24.7851, lat_max=66.1605, lon_max=32.8710)


def utc(year, month, day, hour=0, minute=0):
    return datetime(year, month, day, hour, minute, tzinfo=UTC)


@pytest.fixture()
def registry() -> KnowledgeRegistry:
    return register_cyclone_domain(KnowledgeRegistry())


@pytest.fixture()
def fig5_script() -> str:
    return FIG5_SCRIPT
