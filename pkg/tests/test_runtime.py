from __future__ import annotations

from datetime import datetime, timezone

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, read_fixture
from dflow import model as m, parse
from dflow.runtime import (
    DEFAULT_FALLBACK,
    SERVICE_APOLOGY,
    DialogueSession,
    ErrorNote,
    EventFired,
    Say,
    ServiceInvoked,
    Stub,
    StubTable,
    UserProfile,
    find_entities,
    match_trigger,
)
from strategies import valid_models

FIXED = datetime(2024, 1, 1, tzinfo=timezone.utc)


def fixed_clock() -> datetime:
    return FIXED


@pytest.fixture
def hello():
    return parse(read_fixture("hello_world.dflow"))


@pytest.fixture
def weather():
    return parse(read_fixture("weather.dflow"))


@pytest.fixture
def demo():
    return parse(read_fixture("demo.dflow"))


def weather_session(model, **kwargs) -> DialogueSession:
    return DialogueSession(model, StubTable.load(FIXTURES / "weather_stubs.json"), clock=fixed_clock, **kwargs)


# -- matching ------------------------------------------------------------------------------


def test_hello_matches_greet(hello):
    assert match_trigger(hello, "hello").intent == "greet"


def test_matching_normalizes_case_space_and_punctuation(hello):
    assert match_trigger(hello, "  Good   MORNING!! ").intent == "greet"


def test_pretrained_entity_is_captured(weather):
    result = match_trigger(weather, "Tell me the weather please for tomorrow")
    assert result.intent == "ask_weather"
    assert [(c.kind, c.value) for c in result.entities] == [("DATE", "tomorrow")]


def test_entity_spans_are_greedy_and_keep_case(weather):
    result = match_trigger(weather, "Tell me the weather today for New York")
    assert [(c.kind, c.value) for c in result.entities] == [("DATE", "today"), ("GPE", "New York")]


def test_unrelated_text_does_not_match(hello):
    assert not match_trigger(hello, "completely unrelated").matched
    assert not match_trigger(hello, "").matched


def test_longer_literal_match_wins(weather):
    # "Tell me the weather please" beats the shorter example it extends.
    result = match_trigger(weather, "tell me the weather please")
    assert result.intent == "ask_weather" and result.score == len("tellmetheweatherplease")


def test_ties_between_intents_are_ambiguous():
    model = parse('triggers Intent a "go" PE:GPE end Intent b "go" PE:DATE end end')
    result = match_trigger(model, "go home")
    assert not result.matched and "a, b" in result.note


def test_find_entities_uses_samples_and_patterns(weather):
    found = find_entities(weather, "in Athens on 2024-05-01 at 10:30 for 5 euros")
    kinds = [(c.kind, c.value) for c in found]
    assert ("GPE", "Athens") in kinds
    assert ("DATE", "2024-05-01") in kinds
    assert ("TIME", "10:30") in kinds
    assert ("MONEY", "5 euros") in kinds


# -- reference conversations -----------------------------------------------------------------------


def test_hello_world_conversation(hello):
    session = DialogueSession(hello, StubTable([]))
    assert session.handle_message("hello").items == [Say("Hello friend")]


def test_weather_conversation(weather):
    session = weather_session(weather)
    assert session.handle_message("I want to tell me the weather").texts == ["For which city?"]
    reply = session.handle_message("Thessaloniki")
    assert reply.texts == ["The weather for Thessaloniki is sunny"]
    (invoked,) = [i for i in reply.items if isinstance(i, ServiceInvoked)]
    assert invoked.service == "weather_svc"
    assert invoked.url == (
        "http://services.issel.ee.auth.gr/general_information/weather_openweather"
        "?city=Thessaloniki&language=English"
    )


def test_city_in_the_trigger_prefills_the_slot(weather):
    reply = weather_session(weather).handle_message("Tell me the weather tomorrow for Athens")
    assert reply.texts == ["The weather for Athens is sunny"]


def test_fallback_for_gibberish(hello):
    session = DialogueSession(hello, StubTable([]))
    assert session.handle_message("qwzx vbnm").texts == [DEFAULT_FALLBACK]
    custom = DialogueSession(hello, StubTable([]), fallback="Pardon?")
    assert custom.handle_message("qwzx").texts == ["Pardon?"]


def test_demo_conversation(demo):
    env = StubTable.load(FIXTURES / "demo_stubs.json")
    session = DialogueSession(demo, env, profile=UserProfile(city="Thessaloniki"))
    assert session.handle_message("hey").texts == ["Hello there!"]
    reply = session.handle_message("which pharmacy is open today")
    assert reply.texts == ["The nearest open pharmacy is in Egnatia 12, Thessaloniki"]
    urls = [i.url for i in reply.items if isinstance(i, ServiceInvoked)]
    assert urls[0].endswith("/geospatial/get_coords?place=Thessaloniki")
    assert urls[2].endswith("/medical/pharmacies_nearest?latitude=40.6401&longtitude=22.9444")
    assert session.handle_message("tell me a joke").texts == ["What is the answer to everything?", "42"]


def test_user_profile_form():
    model = parse(read_fixture("user_profile.dflow"))
    session = DialogueSession(model, StubTable([]))
    assert session.handle_message("sign me up").texts == ["What is your full name?"]
    assert session.handle_message("Maria Papadopoulou").texts == ["How old are you?"]
    assert session.handle_message("thirty-ish").texts == ["How old are you?"]  # one re-ask
    assert session.handle_message("31").texts == ["Do you want our newsletter?"]
    assert session.handle_message("maybe").texts == ["Do you want our newsletter?"]
    assert session.handle_message("sure").texts == ["Thanks Maria Papadopoulou, you are 31 years old."]
    assert session.slot_value("profile_form", "newsletter") is True
    assert session.slot_value("profile_form", "age") == 31


def test_entity_slot_accepts_whole_text_after_one_reask():
    model = parse(read_fixture("user_profile.dflow"))
    session = DialogueSession(model, StubTable([]))
    session.handle_message("sign me up")
    session.handle_message("Maria")
    session.handle_message("old")
    reply = session.handle_message("very old")
    assert reply.texts[0].startswith("I need a whole number")
    assert reply.texts[1] == "How old are you?"
    assert session.handle_message("42").texts == ["Do you want our newsletter?"]


def test_form_completes_within_two_turns_per_slot():
    model = parse(read_fixture("user_profile.dflow"))
    session = DialogueSession(model, StubTable([]))
    session.handle_message("create my profile")
    answers = ["Ann", "nope", "7", "hmm", "no"]
    for answer in answers:
        session.handle_message(answer)
    assert session.slot_value("profile_form", "newsletter") is False
    assert len(answers) <= 2 * 3


# -- service failures -----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "stubs, kind",
    [
        ([], "network"),
        ([Stub("GET", "http://services.issel.ee.auth.gr/*", 503, None)], "status"),
        ([Stub("GET", "http://services.issel.ee.auth.gr/*", 200, {"other": 1})], "missing_key"),
    ],
)
def test_service_failure_apologises_and_aborts(weather, stubs, kind):
    session = DialogueSession(weather, StubTable(stubs))
    session.handle_message("I want to tell me the weather")
    reply = session.handle_message("Athens")
    notes = [i for i in reply.items if isinstance(i, ErrorNote)]
    assert [n.kind for n in notes] == [kind]
    assert notes[0].url.startswith("http://services.issel.ee.auth.gr/general_information/")
    assert reply.texts == [SERVICE_APOLOGY]
    assert session.handle_message("hmm").texts == [DEFAULT_FALLBACK]


def test_coercion_failure_from_a_service(demo):
    stubs = StubTable.load(FIXTURES / "demo_stubs.json")
    stubs.stubs[2] = Stub("GET", stubs.stubs[2].url_pattern, 200, {"question": "q", "answer": "many"})
    reply = DialogueSession(demo, stubs).handle_message("tell me a joke")
    assert [i.kind for i in reply.items if isinstance(i, ErrorNote)] == ["coercion"]
    assert reply.texts == [SERVICE_APOLOGY]


# -- actions, properties, determinism ------------------------------------------------------------

RICH_BOT = """triggers
    Intent go
        "go"
    end
    Event alarm uri: 'bus/alarm' end
end
gslots
    counter: int = 3
end
dialogues
    Dialogue d
        on: go
        responses:
            ActionGroup g
                Speak('count' GSLOT:counter)
                SetGSlot(counter, 4)
                Speak('now' GSLOT:counter 'at' SYSTEM:TIME 'in' SYSTEM:LOCATION)
                FireEvent('bus/out', USER:NAME)
                Speak('rolled' SYSTEM:RANDOM_INT)
            end
    end
    Dialogue on_alarm
        on: alarm
        responses:
            ActionGroup ring
                Speak('Wake up' USER:NAME)
            end
    end
end
"""


def test_actions_run_in_declared_order():
    model = parse(RICH_BOT)
    session = DialogueSession(model, StubTable([]), clock=fixed_clock, profile=UserProfile(name="Ann", city="Athens"))
    reply = session.handle_message("go")
    kinds = [type(i).__name__ for i in reply.items]
    assert kinds == ["Say", "Say", "EventFired", "Say"]
    assert reply.texts[0] == "count 3"
    assert reply.texts[1] == "now 4 at 2024-01-01T00:00:00Z in Athens"
    assert reply.items[2] == EventFired("bus/out", "Ann")
    assert session.gslots["counter"] == 4


def test_events_start_their_dialogue():
    session = DialogueSession(parse(RICH_BOT), StubTable([]), profile=UserProfile(name="Ann"))
    assert session.inject_event("alarm").texts == ["Wake up Ann"]
    with pytest.raises(KeyError):
        session.inject_event("go")


def test_system_properties():
    session = DialogueSession(parse(RICH_BOT), StubTable([]), clock=fixed_clock, seed=0)
    assert session.system_property("TIME") == "2024-01-01T00:00:00Z"
    assert session.system_property("LOCATION") == "unknown"
    other = DialogueSession(parse(RICH_BOT), StubTable([]), seed=0)
    assert session.system_property("RANDOM_INT") == other.system_property("RANDOM_INT")
    value = session.system_property("RANDOM_FLOAT")
    assert 0 <= value < 1
    assert 0 <= session.system_property("RANDOM_INT") <= 100


def test_user_profile_rejects_negative_age():
    with pytest.raises(ValueError):
        UserProfile(age=-1)
    assert UserProfile.from_dict({"age": "31", "unknown": 1}).age == 31


def test_same_inputs_same_transcript(demo):
    def run() -> list:
        env = StubTable.load(FIXTURES / "demo_stubs.json")
        session = DialogueSession(demo, env, seed=7, clock=fixed_clock)
        for text in ["hey", "open pharmacies", "make me laugh", "??"]:
            session.handle_message(text)
        return session.transcript

    assert run() == run()


def test_reset_clears_state(weather):
    session = weather_session(weather)
    session.handle_message("I want to tell me the weather")
    session.reset()
    assert session.transcript == []
    assert session.handle_message("Athens").texts == [DEFAULT_FALLBACK]


def test_filling_a_slot_leaves_others_alone(demo):
    env = StubTable.load(FIXTURES / "demo_stubs.json")
    session = DialogueSession(demo, env)
    session.handle_message("tell me a joke")
    before = dict(session.filled)
    session.handle_message("open pharmacies")
    for key, value in before.items():
        assert session.filled[key] == value


# -- fuzz ----------------------------------------------------------------------------------------

UTTERANCE = st.text(alphabet="abcdefghxyz phrase0123456789", max_size=20)


def stub_everything(model: m.Model) -> StubTable:
    body = {"data": {"a": {"b": "1"}, "b": "1"}, "a": {"b": "1"}, "b": "1"}
    return StubTable([Stub(s.verb, s.host + "*", 200, body) for s in model.eservices])


@settings(max_examples=60, deadline=None, suppress_health_check=list(HealthCheck))
@given(valid_models(), st.lists(UTTERANCE, max_size=20), st.integers(0, 3))
def test_valid_models_never_fault(model, utterances, seed):
    session = DialogueSession(model, stub_everything(model), seed=seed, clock=fixed_clock)
    for text in utterances:
        reply = session.handle_message(text)
        assert all(isinstance(i, (Say, EventFired, ServiceInvoked, ErrorNote)) for i in reply.items)
    for event in model.events:
        session.inject_event(event.name)
