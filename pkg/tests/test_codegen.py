from __future__ import annotations

import ast
import io
import re
import zipfile

import pytest
import yaml
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import read_fixture
from dflow import merge, model as m, parse
from dflow.codegen import PROJECT_FILES, InvalidModelError, OverwriteRefused, generate, write_project
from strategies import valid_models


def project_for(name: str):
    return generate(parse(read_fixture(name)))


def check_syntax(project) -> None:
    for path, text in project.files.items():
        if path.endswith(".yml"):
            yaml.safe_load(text)
        else:
            compile(text, path, "exec")


def custom_action_names(project) -> set[str]:
    tree = ast.parse(project.files["actions/actions.py"])
    names = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.FunctionDef) and node.name == "name":
            names.add(node.body[0].value.value)
    return names


# -- reference examples ----------------------------------------------------------------------


def test_hello_world_project():
    project = project_for("hello_world.dflow")
    assert tuple(project.files) == PROJECT_FILES
    assert abs(project.total_lines() - 52) <= 0.15 * 52
    check_syntax(project)


def test_demo_project_size_and_http_classes():
    project = project_for("demo.dflow")
    assert len(project.files) == 8
    assert abs(project.total_lines() - 357) <= 0.15 * 357
    tree = ast.parse(project.files["actions/actions.py"])
    http_classes = [
        node.name for node in tree.body
        if isinstance(node, ast.ClassDef) and "call_service(" in ast.unparse(node)
    ]
    assert len(http_classes) == 3


def test_weather_domain_and_annotations():
    project = project_for("weather.dflow")
    domain = yaml.safe_load(project.files["domain.yml"])
    assert {"city_slot", "answer"} <= set(domain["slots"])
    assert domain["slots"]["city_slot"]["mappings"][0] == {
        "type": "from_entity",
        "entity": "GPE",
        "conditions": [{"active_loop": "form1", "requested_slot": "city_slot"}],
    }
    nlu = yaml.safe_load(project.files["data/nlu.yml"])["nlu"]
    examples = next(block["examples"] for block in nlu if block.get("intent") == "ask_weather")
    assert "[Thessaloniki](GPE)" in examples
    assert "[tomorrow](DATE)" in examples
    config = yaml.safe_load(project.files["config.yml"])
    extractor = next(c for c in config["pipeline"] if c["name"] == "SpacyEntityExtractor")
    assert set(extractor["dimensions"]) == {"GPE", "DATE"}


def test_empty_model_still_has_eight_files(tmp_path):
    project = generate(m.Model())
    assert tuple(project.files) == PROJECT_FILES
    check_syntax(project)
    assert len(write_project(project, tmp_path)) == 8


# -- contract --------------------------------------------------------------------------------


def test_invalid_model_is_rejected_whole():
    model = parse(read_fixture("hello_world.dflow").replace("on: greet", "on: nope"))
    with pytest.raises(InvalidModelError) as info:
        generate(model)
    assert info.value.report.codes[-1] == "V002"


def test_write_project_writes_identical_bytes(tmp_path):
    project = project_for("hello_world.dflow")
    paths = write_project(project, tmp_path / "out")
    assert [p.relative_to(tmp_path / "out").as_posix() for p in paths] == list(PROJECT_FILES)
    for path, rel in zip(paths, PROJECT_FILES):
        assert path.read_bytes() == project.files[rel].encode("utf-8")


def test_write_project_refuses_to_overwrite(tmp_path):
    (tmp_path / "domain.yml").write_text("keep me")
    project = project_for("hello_world.dflow")
    with pytest.raises(OverwriteRefused):
        write_project(project, tmp_path)
    assert (tmp_path / "domain.yml").read_text() == "keep me"
    assert not (tmp_path / "config.yml").exists()
    write_project(project, tmp_path, overwrite=True)
    assert (tmp_path / "domain.yml").read_text() == project.files["domain.yml"]


def test_zip_is_deterministic_and_complete():
    project = project_for("demo.dflow")
    first = project.to_zip()
    assert project_for("demo.dflow").to_zip() == first
    with zipfile.ZipFile(io.BytesIO(first)) as archive:
        assert archive.namelist() == list(PROJECT_FILES)


def test_absolute_paths_are_rejected():
    from dflow.codegen import GeneratedProject

    with pytest.raises(ValueError):
        GeneratedProject({"/etc/passwd": ""})


# -- properties --------------------------------------------------------------------------------


def _coverage(model: m.Model, project) -> None:
    text = "\n".join(project.files.values())
    domain = yaml.safe_load(project.files["domain.yml"]) or {}
    for intent in model.intents:
        assert intent.name in domain.get("intents", [])
    for entity in model.entities:
        assert entity.name in domain.get("entities", [])
    for g in model.gslots:
        assert g.name in domain.get("slots", {})
    for dialogue in model.dialogues:
        for response in dialogue.responses:
            if isinstance(response, m.Form):
                for slot in response.slots:
                    assert slot.name in text
    actions = custom_action_names(project)
    assert actions == set(domain.get("actions", []))


@pytest.mark.parametrize("name", ["hello_world.dflow", "demo.dflow", "weather.dflow", "rich.dflow",
                                  "user_profile.dflow"])
def test_fixture_projects_are_well_formed(name):
    model = parse(read_fixture(name))
    project = generate(model)
    check_syntax(project)
    _coverage(model, project)
    assert generate(model).files == project.files


@settings(max_examples=60, deadline=None, suppress_health_check=list(HealthCheck))
@given(valid_models())
def test_generated_projects_are_well_formed(model):
    project = generate(model)
    assert tuple(project.files) == PROJECT_FILES
    check_syntax(project)
    _coverage(model, project)
    assert generate(model).files == project.files


def test_merge_then_generate_keeps_everything():
    a, b = parse(read_fixture("demo.dflow")), parse(read_fixture("weather.dflow"))
    merged = generate(merge([a, b]))
    merged_actions = custom_action_names(merged)
    merged_intents = set(yaml.safe_load(merged.files["domain.yml"])["intents"])
    for part in (a, b):
        project = generate(part)
        assert custom_action_names(project) <= merged_actions
        assert set(yaml.safe_load(project.files["domain.yml"])["intents"]) <= merged_intents


def test_user_and_system_properties_use_helpers():
    project = project_for("rich.dflow")
    script = project.files["actions/actions.py"]
    assert "class UserProperties" in script and "class SystemProperties" in script
    assert "def publish_event" in script


def test_helpers_are_only_emitted_when_used():
    script = project_for("hello_world.dflow").files["actions/actions.py"]
    assert "def call_service" not in script
    assert "class UserProperties" not in script
    assert re.search(r"^import requests", script, re.M) is None


@settings(max_examples=20, deadline=None)
@given(st.text(alphabet="abc'\"\\{}\n\t é", min_size=1, max_size=20))
def test_awkward_speak_text_stays_valid(text):
    model = m.Model(
        triggers=(m.Intent("i", (m.PhraseExample((m.TextChunk("go"),)),)),),
        dialogues=(m.Dialogue("d", ("i",), (
            m.ActionGroup("g", (m.SpeakAction(m.TemplateString((m.TextPart(text),))),)),
        )),),
    )
    check_syntax(generate(model))
