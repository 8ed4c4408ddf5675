import json
import logging

import pytest
from pydantic import ValidationError

from common.audit import log_event, save_report
from common.config import RunConfig
from common.report import CheckResult, Report, SequenceReport


def test_run_config_defaults():
    cfg = RunConfig(command="pi0", ring=" GF:2 ")
    assert cfg.ring == "GF:2"
    assert cfg.n == 3
    assert cfg.format == "text"
    assert cfg.cap_closure > 0
    assert "out" not in cfg.echo() and "timing" not in cfg.echo()


@pytest.mark.parametrize("fields", [{"ring": "GF:6"}, {"ring": "GF:2", "n": 1}, {"ring": "GF:2", "cap_steps": -1},
                                    {"ring": "GF:2", "format": "xml"}, {"ring": "GF:2", "log_level": "LOUD"}])
def test_run_config_rejects(fields):
    with pytest.raises(ValidationError):
        RunConfig(command="pi0", **fields)


def test_log_level_normalized():
    assert RunConfig(command="verify", ring="Zmod:4", log_level="debug").log_level == "DEBUG"


def test_report_schema_and_status():
    r = Report(command="pi0", status="PASS")
    d = r.to_dict()
    assert d["schema"] == "globact-report/1"
    assert d["status"] == "pass"
    assert "wall_time" not in d
    with pytest.raises(ValidationError):
        Report(command="pi0", status="maybe")


def test_sequence_report_failures():
    rep = SequenceReport(ring="GF:2", n=3)
    rep.composites.append(CheckResult(name="a", passed=True))
    rep.exactness.append(CheckResult(name="b", passed=False, witness={"x": 1}))
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["b"]


def test_log_event_is_one_json_line(caplog):
    with caplog.at_level(logging.INFO, logger="common.audit"):
        log_event("CHECK", source="tests", what="demo", values=(1, 2), nested={"k": {1}})
    record = caplog.records[-1]
    event = json.loads(record.getMessage())
    assert event == {"kind": "CHECK", "source": "tests", "what": "demo", "values": [1, 2], "nested": {"k": [1]}}


def test_save_report_sorted(tmp_path):
    path = save_report("pi0", {"b": 1, "a": 2}, path=tmp_path / "r.json")
    assert path is not None
    text = path.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')


def test_config_is_the_single_source_of_names():
    from typing import get_args

    import common.audit
    import common.config

    assert common.audit.OUT_DIR is common.config.OUT_DIR
    assert get_args(RunConfig.model_fields["command"].annotation) == get_args(common.config.Command)
    assert "sl" in common.config.ACTIONS
    assert RunConfig(command="validate-action", ring="GF:2", action="sl").action == "sl"
