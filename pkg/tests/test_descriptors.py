import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dslake.descriptors import dump_descriptors, load_descriptors
from dslake.errors import DescriptorLoadError
from dslake.registry import (
    DomainLibraryDescriptor,
    ExecutionMode,
    ObjectTypeInfo,
    PackageDescriptor,
    PackageInput,
    PackageOutputDecl,
    Placement,
    StructureLevel,
)
from dslake.cyclone.plugin import bsm_descriptor, library_descriptor

SAMPLE = """\
# the storm-surge service
[package BSM]
input startTime datetime required
input cyclone cyclone-params required
input horizon duration optional 96h
output level timeseries-cm indexable
mode builtin
placement aggregator
procedure cyclone.bsm

[library cyclone]
object cyclone-path high-level center-set
alias cyclone-path cyclon-path
param cyclone-path EndTime datetime
extractor grid cyclone.extract_centers
combiner cyclone-path cyclone.combine_paths
filter cyclone-path direction cyclone.filter_direction
keyword-alias directon direction
"""


def test_sample_loads():
    libraries, packages = load_descriptors(SAMPLE)
    assert [lib.name for lib in libraries] == ["cyclone"]
    assert [pkg.name for pkg in packages] == ["BSM"]
    pkg = packages[0]
    assert pkg.input_named("horizon").default == "96h"
    assert pkg.output_named("level").indexable
    lib = libraries[0]
    assert lib.object_types[0].aliases == ("cyclon-path",)
    assert lib.canonical_keyword("directon") == "direction"


def test_unknown_key_is_load_error():
    with pytest.raises(DescriptorLoadError) as err:
        load_descriptors("[package P]\nfrobnicate yes\n")
    assert err.value.line == 2


def test_content_before_section_rejected():
    with pytest.raises(DescriptorLoadError):
        load_descriptors("input x int required\n")


def test_bad_section_header():
    with pytest.raises(DescriptorLoadError):
        load_descriptors("[widget W]\n")


def test_builtin_descriptors_round_trip():
    libraries = [library_descriptor()]
    packages = [bsm_descriptor()]
    text = dump_descriptors(libraries, packages)
    loaded_libs, loaded_pkgs = load_descriptors(text)
    assert loaded_libs == libraries
    assert loaded_pkgs == packages


# --- random descriptor round-trip --------------------------------------------

names = st.from_regex(r"[a-z][a-z0-9-]{0,8}[a-z0-9]", fullmatch=True)
type_tags = st.sampled_from(["int", "float", "datetime", "duration", "timeseries-cm"])
proc_ids = st.from_regex(r"[a-z]{1,6}\.[a-z]{1,8}", fullmatch=True)

package_inputs = st.builds(
    PackageInput,
    name=st.from_regex(r"[a-z][A-Za-z0-9]{0,8}", fullmatch=True),
    semantic_type=type_tags,
    required=st.booleans(),
    default=st.none() | st.from_regex(r"[0-9]{1,3}h?", fullmatch=True),
)
package_outputs = st.builds(
    PackageOutputDecl,
    name=st.from_regex(r"[a-z][a-z0-9]{0,8}", fullmatch=True),
    semantic_type=type_tags,
    indexable=st.booleans(),
)
packages = st.builds(
    PackageDescriptor,
    name=st.from_regex(r"[A-Z][A-Za-z0-9-]{0,8}", fullmatch=True),
    inputs=st.lists(package_inputs, max_size=4, unique_by=lambda i: i.name).map(tuple),
    outputs=st.lists(package_outputs, max_size=3, unique_by=lambda o: o.name).map(tuple),
    execution_mode=st.sampled_from(ExecutionMode),
    placement=st.sampled_from(Placement),
    command_template=st.none() | st.just("runner --out {outdir}"),
    procedure=st.none() | proc_ids,
)

object_infos = st.builds(
    ObjectTypeInfo,
    name=names,
    aliases=st.lists(names, max_size=2, unique=True).map(tuple),
    structure_level=st.sampled_from(StructureLevel),
    output_params=st.lists(
        st.tuples(st.from_regex(r"[A-Z][a-zA-Z]{0,7}", fullmatch=True), type_tags),
        max_size=4,
        unique_by=lambda p: p[0],
    ).map(tuple),
    fragment_type=st.none() | names,
)
libraries = st.builds(
    DomainLibraryDescriptor,
    name=names,
    object_types=st.lists(object_infos, max_size=3, unique_by=lambda o: o.name).map(tuple),
    extractors=st.lists(st.tuples(names, proc_ids), max_size=2, unique_by=lambda e: e[0]).map(tuple),
    combiners=st.lists(st.tuples(names, proc_ids), max_size=2, unique_by=lambda c: c[0]).map(tuple),
    filters=st.lists(
        st.tuples(names, names, proc_ids), max_size=3, unique_by=lambda f: (f[0], f[1])
    ).map(tuple),
    keyword_aliases=st.lists(st.tuples(names, names), max_size=2, unique_by=lambda a: a[0]).map(tuple),
)


@settings(max_examples=120)
@given(st.lists(libraries, max_size=2, unique_by=lambda l: l.name),
       st.lists(packages, max_size=2, unique_by=lambda p: p.name))
def test_descriptor_round_trip(libs, pkgs):
    text = dump_descriptors(libs, pkgs)
    loaded_libs, loaded_pkgs = load_descriptors(text)
    assert loaded_libs == libs
    assert loaded_pkgs == pkgs
