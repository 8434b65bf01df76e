import os

import pytest

from lvlinker.errors import BadValueError, ConflictingRevisionError, UnknownProjectError
from lvlinker.filtering import FilterSpec, Predicate
from lvlinker.model import VideoMeta
from lvlinker.project_store import (
    Project,
    ProjectStore,
    TaskItem,
    TaskSheet,
    export_task_sheet,
)


def sample_project(pid="p1") -> Project:
    return Project(
        project_id=pid,
        name="Study session 3",
        log_source_path="/data/logs/session3.jsonl",
        source_digest="abc123",
        videos=[
            VideoMeta("v1", "v1.mp4", "First", 1_650_000_000_000, 360_000, sync_offset_ms=250),
            VideoMeta("v2", "v2.mp4", "Second", 1_650_000_500_000, 360_000),
        ],
        active_video_id="v2",
        linked=False,
        filter_spec=FilterSpec(
            frozenset(["KEY_LOG", "NOTIFICATION"]),
            visible_columns={"KEY_LOG": frozenset(["timestamp", "currentKey"])},
            value_predicates=(Predicate("packageName", "equals", ("com.sms",)),),
        ),
        task_sheet=TaskSheet(
            [
                TaskItem("t1", "Find the typing interval", "2.7s", 1_650_000_100_000),
                TaskItem("t2", "Count camera transitions"),
            ]
        ),
    )


class TestSaveLoad:
    def test_round_trip_is_field_identical(self, tmp_path):
        store = ProjectStore(tmp_path)
        project = sample_project()
        revision = store.save(project)
        loaded, loaded_rev = store.load("p1")
        assert loaded == project
        assert loaded_rev == revision
        assert loaded.videos[0].sync_offset_ms == 250
        assert loaded.filter_spec == project.filter_spec

    def test_save_sets_timestamps(self, tmp_path):
        store = ProjectStore(tmp_path)
        project = sample_project()
        store.save(project)
        assert project.created_at > 0
        assert project.updated_at >= project.created_at

    def test_stale_token_conflicts(self, tmp_path):
        store = ProjectStore(tmp_path)
        project = sample_project()
        rev1 = store.save(project)
        project.name = "renamed"
        rev2 = store.save(project, expected_revision=rev1)
        assert rev2 != rev1
        project.name = "renamed again"
        with pytest.raises(ConflictingRevisionError):
            store.save(project, expected_revision=rev1)

    def test_unconditional_save_wins(self, tmp_path):
        store = ProjectStore(tmp_path)
        project = sample_project()
        store.save(project)
        project.name = "other"
        store.save(project)
        assert store.load("p1")[0].name == "other"

    def test_unknown_active_video_rejected_nothing_written(self, tmp_path):
        store = ProjectStore(tmp_path)
        project = sample_project()
        project.active_video_id = "nope"
        with pytest.raises(BadValueError):
            store.save(project)
        with pytest.raises(UnknownProjectError):
            store.load("p1")

    def test_load_missing_project(self, tmp_path):
        with pytest.raises(UnknownProjectError):
            ProjectStore(tmp_path).load("ghost")

    def test_duplicate_video_ids_rejected(self, tmp_path):
        project = sample_project()
        project.videos.append(project.videos[0])
        with pytest.raises(BadValueError):
            ProjectStore(tmp_path).save(project)

    def test_corrupted_document_is_a_data_error(self, tmp_path):
        store = ProjectStore(tmp_path)
        (tmp_path / "bad.json").write_text("{not json")
        with pytest.raises(BadValueError):
            store.load("bad")
        (tmp_path / "half.json").write_text('{"projectId": "half"}')
        with pytest.raises(BadValueError):
            store.load("half")

    def test_unsafe_ids_rejected(self, tmp_path):
        store = ProjectStore(tmp_path)
        for bad in ("", "../escape", ".hidden"):
            with pytest.raises(BadValueError):
                store.load(bad)

    def test_list_projects(self, tmp_path):
        store = ProjectStore(tmp_path)
        store.save(sample_project("a"))
        store.save(sample_project("b"))
        listed = store.list_projects()
        assert [p["projectId"] for p in listed] == ["a", "b"]
        assert all(p["name"] == "Study session 3" for p in listed)


class TestAtomicity:
    def test_interrupted_write_leaves_old_revision(self, tmp_path, monkeypatch):
        store = ProjectStore(tmp_path)
        project = sample_project()
        store.save(project)
        before, rev_before = store.load("p1")

        def explode(src, dst):
            raise OSError("disk gone")

        monkeypatch.setattr(os, "replace", explode)
        project.name = "will not land"
        with pytest.raises(OSError):
            store.save(project)
        monkeypatch.undo()

        after, rev_after = store.load("p1")
        assert after == before
        assert rev_after == rev_before
        # no temp litter
        assert list(tmp_path.glob(".tmp-*")) == []


class TestTaskSheetExport:
    def test_empty_sheet_is_header_only(self):
        project = Project(project_id="p", name="n")
        assert export_task_sheet(project) == b"taskId,prompt,answer,answeredAt\r\n"

    def test_comma_answer_is_quoted(self):
        project = Project(
            project_id="p",
            name="n",
            task_sheet=TaskSheet([TaskItem("t1", "prompt", "a, b", 5)]),
        )
        data = export_task_sheet(project).decode()
        assert '"a, b"' in data

    def test_four_tasks_make_five_lines(self):
        sheet = TaskSheet([TaskItem(f"t{i}", f"prompt {i}") for i in range(4)])
        project = Project(project_id="p", name="n", task_sheet=sheet)
        lines = export_task_sheet(project).decode().split("\r\n")
        assert lines[-1] == ""
        assert len([l for l in lines if l]) == 5

    def test_unanswered_renders_empty(self):
        project = Project(
            project_id="p", name="n", task_sheet=TaskSheet([TaskItem("t1", "p")])
        )
        assert export_task_sheet(project).decode().split("\r\n")[1] == "t1,p,,"

    def test_duplicate_task_ids_rejected(self):
        with pytest.raises(ValueError):
            TaskSheet([TaskItem("t1", "a"), TaskItem("t1", "b")])
