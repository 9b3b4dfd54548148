"""The bridge service surface: every robot/tour/stats operation by name.

Handlers take the JSON ``args`` object of a call_service frame and return the
JSON ``values`` payload. They hold the world lock for their whole body, so a
service call observes and mutates a consistent world state between ticks.
"""

from __future__ import annotations

from typing import Any, Optional

from . import analytics
from .errors import ValidationError
from .model import Pose2D

SERVICE_NAMES = (
    "/robot/status",
    "/motion/goto",
    "/motion/teleop",
    "/speech/say",
    "/location/save",
    "/location/list",
    "/location/edit",
    "/location/delete",
    "/tour/list",
    "/tour/get",
    "/tour/create",
    "/tour/edit",
    "/tour/copy",
    "/tour/delete",
    "/tour/execute",
    "/tour/abort",
    "/store/search",
    "/stats/monthly",
    "/stats/types",
    "/stats/tour",
    "/recommend/popular",
    "/recommend/custom",
)


def _obj(args: Any) -> dict:
    if args is None:
        return {}
    if not isinstance(args, dict):
        raise ValidationError("service args must be a JSON object")
    return args


def _need(args: dict, key: str) -> Any:
    if key not in args or args[key] is None:
        raise ValidationError(f"missing argument {key!r}")
    return args[key]


def _need_str(args: dict, key: str) -> str:
    value = _need(args, key)
    if not isinstance(value, str):
        raise ValidationError(f"argument {key!r} must be a string")
    return value


def _opt_int(args: dict, key: str) -> Optional[int]:
    value = args.get(key)
    if value is None:
        return None
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValidationError(f"argument {key!r} must be an integer")
    return value


def _int_or(args: dict, key: str, default: int) -> int:
    value = _opt_int(args, key)
    return default if value is None else value


def register_services(world) -> None:
    """Advertise every service on the world's router."""
    adv = world.router.advertise
    store = world.store
    sim = world.sim

    def locked(fn):
        def handler(args):
            with world.lock:
                result = fn(_obj(args))
            world.autosave_if_due()
            return result

        return handler

    # -- robot ------------------------------------------------------------

    def robot_status(args):
        return sim.status.to_json()

    def motion_goto(args):
        return sim.set_goal(Pose2D.from_json(args)).to_json()

    def motion_teleop(args):
        return sim.teleop(_need_str(args, "direction")).to_json()

    def speech_say(args):
        return sim.speak(_need_str(args, "text")).to_json()

    # -- locations ----------------------------------------------------------

    def location_save(args):
        name = _need_str(args, "name")
        description = args.get("description", "")
        return store.add_location(name, sim.status.pose, description).to_json()

    def location_list(args):
        return [location.to_json() for location in store.list_locations()]

    def location_edit(args):
        patch = _need(args, "patch")
        if not isinstance(patch, dict):
            raise ValidationError("argument 'patch' must be a JSON object")
        return store.edit_location(_need_str(args, "id"), patch).to_json()

    def location_delete(args):
        location_id = _need_str(args, "id")
        store.delete_location(location_id)
        return {"deleted": location_id}

    # -- tours ------------------------------------------------------------

    def tour_list(args):
        return [tour.to_json() for tour in store.list_tours()]

    def tour_get(args):
        return store.get_tour(_need_str(args, "id")).to_json()

    def tour_create(args):
        return store.create_tour(
            name=_need_str(args, "name"),
            tour_type=args.get("tour_type", ""),
            stop_location_ids=_need(args, "stop_location_ids"),
            expected_duration=_need(args, "expected_duration"),
        ).to_json()

    def tour_edit(args):
        patch = _need(args, "patch")
        if not isinstance(patch, dict):
            raise ValidationError("argument 'patch' must be a JSON object")
        return store.edit_tour(_need_str(args, "id"), patch).to_json()

    def tour_copy(args):
        return store.copy_tour(_need_str(args, "id"), args.get("new_name")).to_json()

    def tour_delete(args):
        tour_id = _need_str(args, "id")
        store.delete_tour(tour_id)
        return {"deleted": tour_id}

    def tour_execute(args):
        run_id = world.executor.execute(_need_str(args, "id"))
        return {"run_id": run_id}

    def tour_abort(args):
        return world.executor.abort().to_json()

    def store_search(args):
        found = store.search(args.get("query", ""))
        return {
            "tours": [tour.to_json() for tour in found["tours"]],
            "locations": [location.to_json() for location in found["locations"]],
        }

    # -- analytics ----------------------------------------------------------

    def stats_monthly(args):
        window = _int_or(args, "window_months", analytics.DEFAULT_WINDOW_MONTHS)
        return analytics.monthly_counts(store.runs_snapshot(), store.clock.now(), window).to_json()

    def stats_types(args):
        window = _int_or(args, "window_months", analytics.DEFAULT_WINDOW_MONTHS)
        return analytics.type_distribution(
            store.runs_snapshot(), store.list_tours(), store.clock.now(), window
        ).to_json()

    def stats_tour(args):
        tour_id = _need_str(args, "id")
        exists = tour_id in store.tours
        return analytics.tour_detail(tour_id, store.runs_snapshot(), tour_exists=exists).to_json()

    def recommend_popular(args):
        return _recommend(analytics.RecommendationParams())

    def recommend_custom(args):
        params = analytics.RecommendationParams(
            tour_type=args.get("tour_type"),
            max_duration=_opt_int(args, "max_duration"),
            window_months=_int_or(args, "window_months", analytics.DEFAULT_WINDOW_MONTHS),
            top_k=_int_or(args, "top_k", analytics.DEFAULT_TOP_K),
        )
        return _recommend(params)

    def _recommend(params):
        ranked = analytics.recommend(
            store.list_tours(), store.runs_snapshot(), store.clock.now(), params
        )
        return [{"tour": tour.to_json(), "run_count": count} for tour, count in ranked]

    handlers = {
        "/robot/status": robot_status,
        "/motion/goto": motion_goto,
        "/motion/teleop": motion_teleop,
        "/speech/say": speech_say,
        "/location/save": location_save,
        "/location/list": location_list,
        "/location/edit": location_edit,
        "/location/delete": location_delete,
        "/tour/list": tour_list,
        "/tour/get": tour_get,
        "/tour/create": tour_create,
        "/tour/edit": tour_edit,
        "/tour/copy": tour_copy,
        "/tour/delete": tour_delete,
        "/tour/execute": tour_execute,
        "/tour/abort": tour_abort,
        "/store/search": store_search,
        "/stats/monthly": stats_monthly,
        "/stats/types": stats_types,
        "/stats/tour": stats_tour,
        "/recommend/popular": recommend_popular,
        "/recommend/custom": recommend_custom,
    }
    assert set(handlers) == set(SERVICE_NAMES)
    for name, fn in handlers.items():
        adv(name, locked(fn))
