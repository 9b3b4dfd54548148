"""Tour library CRUD, search, and the persisted tour-file format."""

import os
import random
from datetime import timedelta

import pytest

from support import BASE_TIME, make_clock, random_store
from tourbot.errors import ConflictError, NotFoundError, StoreFormatError, ValidationError
from tourbot.model import Pose2D, TourRun, new_id
from tourbot.store import (
    TourStore,
    UnsupportedVersionError,
    canonical_json,
    load_store,
    loads_store,
    save_store,
    store_from_payload,
)


@pytest.fixture
def store():
    return TourStore(clock=make_clock())


@pytest.fixture
def populated(store):
    entrance = store.add_location("entrance", Pose2D(0, 0, 0), "welcome to the hall")
    occulus = store.add_location("occulus", Pose2D(1, 2, 0.5), "the viewing dome")
    aviary = store.add_location("aviary", Pose2D(4, 3, 1.0), "forty bird species")
    store.clock.advance(60)
    zoo = store.create_tour("Zoo", "exhibition", [entrance.id, occulus.id], 15)
    lab = store.create_tour("Lab Circuit", "lab", [occulus.id], 10)
    return store, dict(entrance=entrance, occulus=occulus, aviary=aviary, zoo=zoo, lab=lab)


class TestLocations:
    def test_add_and_get(self, store):
        location = store.add_location("occulus", Pose2D(1, 2, 0.5), "dome")
        assert store.get_location(location.id) == location
        assert location.pose == Pose2D(1, 2, 0.5)

    def test_duplicate_name_conflict(self, store):
        store.add_location("occulus", Pose2D(0, 0, 0))
        with pytest.raises(ConflictError):
            store.add_location("occulus", Pose2D(1, 1, 0))

    def test_name_uniqueness_case_insensitive(self, store):
        store.add_location("Occulus", Pose2D(0, 0, 0))
        with pytest.raises(ConflictError):
            store.add_location("OCCULUS", Pose2D(1, 1, 0))

    def test_blank_name_rejected(self, store):
        with pytest.raises(ValidationError):
            store.add_location("  ", Pose2D(0, 0, 0))

    def test_name_stripped(self, store):
        assert store.add_location("  lobby  ", Pose2D(0, 0, 0)).name == "lobby"

    def test_list_sorted_by_name(self, populated):
        store, _ = populated
        assert [l.name for l in store.list_locations()] == ["aviary", "entrance", "occulus"]

    def test_edit_patches_fields(self, populated):
        store, refs = populated
        edited = store.edit_location(
            refs["occulus"].id, {"description": "new text", "pose": {"x": 9, "y": 9, "theta": 0}}
        )
        assert edited.description == "new text"
        assert edited.pose == Pose2D(9, 9, 0)
        assert edited.name == "occulus"
        assert edited.created_at == refs["occulus"].created_at

    def test_edit_rename_collision(self, populated):
        store, refs = populated
        with pytest.raises(ConflictError):
            store.edit_location(refs["occulus"].id, {"name": "Entrance"})

    def test_edit_own_name_case_change_allowed(self, populated):
        store, refs = populated
        assert store.edit_location(refs["occulus"].id, {"name": "OCCULUS"}).name == "OCCULUS"

    def test_edit_unknown_key_rejected(self, populated):
        store, refs = populated
        with pytest.raises(ValidationError):
            store.edit_location(refs["occulus"].id, {"colour": "red"})

    def test_delete_unreferenced(self, populated):
        store, refs = populated
        store.delete_location(refs["aviary"].id)
        with pytest.raises(NotFoundError):
            store.get_location(refs["aviary"].id)

    def test_delete_referenced_rejected_listing_tours(self, populated):
        store, refs = populated
        with pytest.raises(ConflictError) as err:
            store.delete_location(refs["occulus"].id)
        assert "Zoo" in err.value.message
        names = [t["name"] for t in err.value.detail["referenced_by"]]
        assert names == ["Lab Circuit", "Zoo"]

    def test_delete_twice_not_found(self, populated):
        store, refs = populated
        store.delete_location(refs["aviary"].id)
        with pytest.raises(NotFoundError):
            store.delete_location(refs["aviary"].id)


class TestTours:
    def test_create_with_two_stops(self, populated):
        store, refs = populated
        tour = refs["zoo"]
        assert tour.name == "Zoo"
        assert [s.location_id for s in tour.stops] == [refs["entrance"].id, refs["occulus"].id]
        assert tour.created_at == tour.updated_at

    def test_create_unknown_location_named_in_error(self, populated):
        store, _ = populated
        ghost = new_id()
        with pytest.raises(ValidationError, match=ghost):
            store.create_tour("Ghost", "demo", [ghost], 5)

    def test_create_empty_stop_list_rejected(self, store):
        with pytest.raises(ValidationError):
            store.create_tour("Empty", "demo", [], 5)

    def test_create_zero_duration_rejected(self, populated):
        store, refs = populated
        with pytest.raises(ValidationError):
            store.create_tour("Quick", "demo", [refs["entrance"].id], 0)

    def test_duplicate_name_conflict(self, populated):
        store, refs = populated
        with pytest.raises(ConflictError):
            store.create_tour("zoo", "demo", [refs["entrance"].id], 5)

    def test_find_by_name_case_insensitive(self, populated):
        store, refs = populated
        assert store.find_tour_by_name("zOO") == refs["zoo"]

    def test_minimal_patch_changes_only_named_fields(self, populated):
        store, refs = populated
        store.clock.advance(120)
        edited = store.edit_tour(refs["zoo"].id, {"tour_type": "exhibition hall"})
        assert edited.tour_type == "exhibition hall"
        assert edited.updated_at > refs["zoo"].updated_at
        assert edited.name == refs["zoo"].name
        assert edited.stops == refs["zoo"].stops
        assert edited.expected_duration == refs["zoo"].expected_duration
        assert edited.created_at == refs["zoo"].created_at

    def test_reverse_stop_order(self, populated):
        store, refs = populated
        reversed_ids = [s.location_id for s in reversed(refs["zoo"].stops)]
        edited = store.edit_tour(refs["zoo"].id, {"stops": reversed_ids})
        assert [s.location_id for s in edited.stops] == reversed_ids
        assert len(store.locations) == 3  # locations untouched

    def test_set_speech_override(self, populated):
        store, refs = populated
        stops = [s.to_json() for s in refs["zoo"].stops]
        stops[0]["speech_override"] = "follow me please"
        edited = store.edit_tour(refs["zoo"].id, {"stops": stops})
        assert edited.stops[0].speech_override == "follow me please"
        assert edited.stops[1].speech_override is None

    def test_edit_unknown_tour(self, store):
        with pytest.raises(NotFoundError):
            store.edit_tour(new_id(), {"name": "x"})

    def test_edit_rename_collision(self, populated):
        store, refs = populated
        with pytest.raises(ConflictError):
            store.edit_tour(refs["zoo"].id, {"name": "LAB CIRCUIT"})

    def test_edit_unknown_patch_key(self, populated):
        store, refs = populated
        with pytest.raises(ValidationError):
            store.edit_tour(refs["zoo"].id, {"speed": 11})

    def test_edit_stops_must_resolve(self, populated):
        store, refs = populated
        with pytest.raises(ValidationError):
            store.edit_tour(refs["zoo"].id, {"stops": [new_id()]})

    def test_copy_default_name_and_fresh_identity(self, populated):
        store, refs = populated
        store.clock.advance(3600)
        copy = store.copy_tour(refs["zoo"].id)
        assert copy.name == "Zoo (copy)"
        assert copy.id != refs["zoo"].id
        assert copy.stops == refs["zoo"].stops
        assert copy.tour_type == refs["zoo"].tour_type
        assert copy.expected_duration == refs["zoo"].expected_duration
        assert copy.created_at > refs["zoo"].created_at

    def test_copy_then_edit_leaves_original_unchanged(self, populated):
        store, refs = populated
        copy = store.copy_tour(refs["zoo"].id, "Zoo B")
        store.edit_tour(copy.id, {"stops": [refs["aviary"].id], "name": "Zoo B2"})
        original = store.get_tour(refs["zoo"].id)
        assert original == refs["zoo"]

    def test_copy_name_collision(self, populated):
        store, refs = populated
        with pytest.raises(ConflictError):
            store.copy_tour(refs["zoo"].id, "lab circuit")

    def test_delete_tour(self, populated):
        store, refs = populated
        store.delete_tour(refs["lab"].id)
        with pytest.raises(NotFoundError):
            store.get_tour(refs["lab"].id)
        # its location is deletable once the referencing tour is gone
        store.delete_tour(refs["zoo"].id)
        store.delete_location(refs["occulus"].id)

    def test_crud_never_touches_run_history(self, populated):
        store, refs = populated
        run = TourRun(
            run_id=new_id(),
            tour_id=refs["zoo"].id,
            started_at=BASE_TIME,
            ended_at=BASE_TIME + timedelta(seconds=100),
            outcome="completed",
            stops_visited=2,
        )
        store.append_run(run)
        store.edit_tour(refs["zoo"].id, {"name": "Zoo 2"})
        store.copy_tour(refs["zoo"].id, "Zoo 3")
        store.delete_tour(refs["lab"].id)
        assert store.runs_snapshot() == [run]


class TestSearch:
    def test_substring_matches_tour(self, populated):
        store, _ = populated
        found = store.search("zo")
        assert [t.name for t in found["tours"]] == ["Zoo"]

    def test_case_insensitive_both_collections(self, populated):
        store, _ = populated
        found = store.search("A")
        assert [t.name for t in found["tours"]] == ["Lab Circuit"]
        assert [l.name for l in found["locations"]] == ["aviary", "entrance"]

    def test_empty_query_returns_everything(self, populated):
        store, _ = populated
        found = store.search("")
        assert len(found["tours"]) == 2
        assert len(found["locations"]) == 3

    def test_no_match(self, populated):
        store, _ = populated
        found = store.search("ZZZZ")
        assert found == {"tours": [], "locations": []}


class TestPersistence:
    def test_round_trip_small_store(self, populated, tmp_path):
        store, refs = populated
        for i in range(5):
            started = BASE_TIME + timedelta(hours=i)
            store.append_run(
                TourRun(
                    run_id=new_id(),
                    tour_id=refs["zoo"].id,
                    started_at=started,
                    ended_at=started + timedelta(seconds=90),
                    outcome="completed",
                    stops_visited=2,
                )
            )
        path = tmp_path / "store.json"
        save_store(store, path)
        loaded = load_store(path)
        assert loaded.to_payload() == store.to_payload()

    def test_empty_store_round_trip(self, store, tmp_path):
        path = tmp_path / "empty.json"
        save_store(store, path)
        assert load_store(path).to_payload() == store.to_payload()

    def test_export_bytes_deterministic(self, populated):
        store, _ = populated
        assert canonical_json(store) == canonical_json(store)

    def test_payload_order_does_not_affect_canonical_bytes(self, populated):
        store, _ = populated
        payload = store.to_payload()
        shuffled = dict(payload)
        shuffled["locations"] = list(reversed(payload["locations"]))
        shuffled["tours"] = list(reversed(payload["tours"]))
        rebuilt = store_from_payload(shuffled)
        assert canonical_json(rebuilt) == canonical_json(store)

    def test_unsupported_schema_version(self, tmp_path):
        path = tmp_path / "future.json"
        path.write_text('{"schema_version": 99, "locations": [], "tours": [], "runs": []}')
        with pytest.raises(UnsupportedVersionError, match="99"):
            load_store(path)

    def test_missing_version_rejected(self):
        with pytest.raises(UnsupportedVersionError):
            loads_store('{"locations": []}')

    def test_malformed_file_reports_line(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "schema_version": 1,\n  "locations": [}\n}')
        with pytest.raises(StoreFormatError, match="line 3"):
            load_store(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(NotFoundError):
            load_store(tmp_path / "nowhere.json")

    def test_duplicate_ids_rejected(self, populated):
        store, _ = populated
        payload = store.to_payload()
        payload["locations"].append(payload["locations"][0])
        with pytest.raises(StoreFormatError, match="duplicate"):
            store_from_payload(payload)

    def test_duplicate_names_rejected(self, populated):
        store, _ = populated
        payload = store.to_payload()
        clone = dict(payload["tours"][0])
        clone["id"] = new_id()
        payload["tours"].append(clone)
        with pytest.raises(StoreFormatError):
            store_from_payload(payload)

    def test_save_is_atomic_under_replace_failure(self, populated, tmp_path, monkeypatch):
        store, refs = populated
        path = tmp_path / "store.json"
        save_store(store, path)
        before = path.read_bytes()
        store.add_location("new spot", Pose2D(5, 5, 0))

        def explode(src, dst):
            raise OSError("disk detached")

        monkeypatch.setattr(os, "replace", explode)
        with pytest.raises(OSError):
            save_store(store, path)
        monkeypatch.undo()
        assert path.read_bytes() == before  # target untouched by the failed save

    def test_runs_sorted_by_start_then_id(self, store):
        tour_id = new_id()
        ids = sorted([new_id() for _ in range(3)], reverse=True)
        for run_id in ids:
            store.append_run(
                TourRun(
                    run_id=run_id,
                    tour_id=tour_id,
                    started_at=BASE_TIME,
                    ended_at=BASE_TIME,
                    outcome="failed",
                    stops_visited=0,
                )
            )
        payload = store.to_payload()
        assert [r["run_id"] for r in payload["runs"]] == sorted(ids)

    def test_random_store_round_trips(self, tmp_path):
        rng = random.Random(99)
        for case in range(25):
            store = random_store(rng)
            path = tmp_path / f"s{case}.json"
            save_store(store, path)
            loaded = load_store(path)
            assert loaded.to_payload() == store.to_payload()
            save_store(loaded, path)
            assert canonical_json(load_store(path)) == canonical_json(store)


class TestResolveStops:
    def test_missing_location_named(self, populated):
        store, refs = populated
        tour = refs["lab"]
        store.delete_tour(refs["zoo"].id)
        # force-delete the location underneath the lab tour via payload surgery
        payload = store.to_payload()
        payload["locations"] = [
            l for l in payload["locations"] if l["id"] != refs["occulus"].id
        ]
        broken = store_from_payload(payload)
        with pytest.raises(ValidationError, match=refs["occulus"].id):
            broken.resolve_stops(broken.get_tour(tour.id))

    def test_resolves_in_order(self, populated):
        store, refs = populated
        resolved = store.resolve_stops(refs["zoo"])
        assert [loc.name for _, loc in resolved] == ["entrance", "occulus"]


class TestConcurrentSaves:
    def test_parallel_autosaves_never_collide_on_the_temp_file(self, tmp_path):
        import threading

        from tourbot.config import AppConfig
        from tourbot.world import World

        cfg = AppConfig(store_path=str(tmp_path / "store.json"))
        world = World(cfg=cfg, clock=make_clock(), autosave=True)
        errors = []

        # every iteration bumps the revision, so every autosave really writes;
        # four threads hammer the same target file
        def writer(tag):
            try:
                for i in range(150):
                    with world.lock:
                        world.store.add_location(f"spot-{tag}-{i}", Pose2D(float(i), 0.0, 0.0), "")
                    world.autosave_if_due()
            except BaseException as exc:
                errors.append(exc)

        threads = [threading.Thread(target=writer, args=(k,)) for k in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert errors == []
        world.save()
        assert len(load_store(tmp_path / "store.json").locations) == 600
