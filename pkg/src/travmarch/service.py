"""Live interaction endpoint: one simulated episode driven tick by tick,
steered over a JSON-message socket by an operator console.

All simulation state is owned by a single session object; the network layer
feeds commands into the owner loop and fans snapshots out to clients, so
clients never observe a torn state. Every command is logged with the tick it
was applied at; the log plus the master seed replay the episode headlessly.

Wire protocol (see docs/service_protocol.json): every message is
``{"type": <string>, "seq": <int>, "payload": <object>}``. The server sends
``full_state`` on connect, then ``snapshot`` deltas on a fixed period, plus
``ack``/``error`` replies to commands and ``raster`` replies to
``get_raster`` requests. Non-finite floats are serialized as null.
"""

from __future__ import annotations

import asyncio
import json
import math
from typing import Optional

import numpy as np

from .errors import (
    BindError,
    GoalBlocked,
    InvalidTarget,
    NoPath,
    StartBlocked,
    UnknownObstacle,
)
from .grid_map import Point
from .planner import PlanningContext
from .regions import _rle_encode
from .simulator import (
    PerceptionMode,
    RobotState,
    SimConfig,
    follow_path,
    make_agent,
    perceive,
    step_obstacles,
)

COMMANDS = (
    "set_goal",
    "spawn_obstacle",
    "remove_obstacle",
    "pause",
    "resume",
    "set_perception",
    "set_seed",
    "reset",
)


def _clean(value):
    """JSON-safe floats: non-finite becomes null."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    return value


class InteractiveSession:
    """Single-owner episode state machine behind the service.

    The session starts paused; a ``resume`` command starts the clock. The
    episode never self-terminates: reaching the goal parks the robot until
    the next ``set_goal``, and collisions are counted rather than fatal.
    """

    def __init__(self, cfg: SimConfig, context: Optional[PlanningContext] = None):
        cfg.validate()
        self.cfg = cfg
        self.context = context or PlanningContext.from_grid(cfg.grid, cfg.planner_cfg, cfg.max_region_area)
        self.command_log: list = []
        self.pending_seed = cfg.master_seed
        self._replan_every = max(1, int(round(cfg.replan_period / cfg.dt)))
        self._init_episode(cfg.master_seed)

    def _init_episode(self, seed: int) -> None:
        cfg = self.cfg
        self.seed = seed
        self.paused = True
        self.tick_index = 0
        self.sim_time = 0.0
        self.goal = Point(cfg.goal[0], cfg.goal[1])
        self.perception = cfg.perception
        self.robot = RobotState(
            cfg.robot_start[0], cfg.robot_start[1], cfg.robot_heading,
            cfg.robot_v_max, cfg.robot_w_max, cfg.robot_radius,
        )
        self.agents = [
            make_agent(i, Point(p[0], p[1]), seed, cfg.obstacle_radius,
                       cfg.obstacle_v_lin, cfg.obstacle_v_ang)
            for i, p in enumerate(cfg.obstacle_starts)
        ]
        self.next_agent_id = len(self.agents)
        self.tracks: dict = {}
        self.path = None
        self.velocity = None
        self.tr_values = None
        self.arrival = None
        self.last_plan_tick = None
        self.goal_reached = False
        self.traveled = 0.0
        self.idle = 0.0
        self.min_obstacle_distance = math.inf
        self._sum_obstacle_distance = 0.0
        self._distance_steps = 0
        self.replan_count = 0
        self.failed_plans = 0
        self.noncritical_contacts = 0
        self.critical_events = 0
        self._contact_streak = 0.0
        self._in_contact = False
        n_pre = int(round(cfg.preroll / cfg.dt))
        for k in range(n_pre):
            step_obstacles(self.agents, cfg.grid, cfg.dt)
            perceive(self.perception, self.robot, self.agents, cfg.grid, self.tracks, (k - n_pre) * cfg.dt)

    # --- commands ---

    def apply_command(self, command: dict, log: bool = True) -> dict:
        """Apply one validated command; raises typed errors on bad input.
        Returns a small result dict for the ack payload."""
        name = command.get("name")
        if name not in COMMANDS:
            raise InvalidTarget(f"unknown command {name!r}")
        grid = self.cfg.grid
        if log:
            self.command_log.append({"tick": self.tick_index, "command": dict(command)})

        if name == "set_goal":
            p = Point(float(command["x"]), float(command["y"]))
            if not grid.contains(p) or grid.is_occupied(grid.world_to_cell(p)):
                if log:
                    self.command_log.pop()
                raise InvalidTarget(f"goal {tuple(p)} is outside the map or occupied")
            self.goal = p
            self.goal_reached = False
            return {"goal": [p.x, p.y]}
        if name == "spawn_obstacle":
            p = Point(float(command["x"]), float(command["y"]))
            blocked = not grid.contains(p) or grid.is_occupied(grid.world_to_cell(p))
            if not blocked:
                for other in self.agents:
                    if math.hypot(p.x - other.x, p.y - other.y) < 2 * self.cfg.obstacle_radius:
                        blocked = True
                        break
            if blocked:
                if log:
                    self.command_log.pop()
                raise InvalidTarget(f"cannot spawn an obstacle at {tuple(p)}")
            agent = make_agent(
                self.next_agent_id, p, self.seed, self.cfg.obstacle_radius,
                self.cfg.obstacle_v_lin, self.cfg.obstacle_v_ang,
            )
            self.next_agent_id += 1
            self.agents.append(agent)
            return {"agent_id": agent.agent_id}
        if name == "remove_obstacle":
            agent_id = int(command["id"])
            for k, agent in enumerate(self.agents):
                if agent.agent_id == agent_id:
                    del self.agents[k]
                    return {"removed": agent_id}
            if log:
                self.command_log.pop()
            raise UnknownObstacle(f"no obstacle with id {agent_id}")
        if name == "pause":
            self.paused = True
            return {"paused": True}
        if name == "resume":
            self.paused = False
            return {"paused": False}
        if name == "set_perception":
            mode = PerceptionMode(
                command.get("mode", self.perception.mode),
                float(command.get("sensor_range", self.perception.sensor_range)),
                float(command.get("fov", self.perception.fov)),
            )
            mode.validate()
            self.perception = mode
            return {"perception": mode.mode}
        if name == "set_seed":
            self.pending_seed = int(command["seed"])
            return {"seed_on_reset": self.pending_seed}
        # reset
        self._init_episode(self.pending_seed)
        return {"reset": True, "seed": self.seed}

    # --- simulation ---

    def tick(self) -> None:
        """Advance one simulation step (caller gates on pause)."""
        cfg = self.cfg
        grid = cfg.grid
        t = self.sim_time
        step_obstacles(self.agents, grid, cfg.dt)
        perceive(self.perception, self.robot, self.agents, grid, self.tracks, t)

        if self.tick_index % self._replan_every == 0:
            try:
                result = self.context.plan_query(
                    Point(self.robot.x, self.robot.y),
                    self.goal,
                    tracks=list(self.tracks.values()),
                    now=t,
                    planner=cfg.planner,
                )
            except (NoPath, StartBlocked, GoalBlocked):
                self.failed_plans += 1
            else:
                self.path = result.path
                self.velocity = result.velocity
                self.arrival = result.field.arrival
                self.tr_values = None if result.tr_map is None else result.tr_map.values
                self.replan_count += 1
                self.last_plan_tick = self.tick_index

        at_goal = math.hypot(self.robot.x - self.goal.x, self.robot.y - self.goal.y) <= cfg.robot_radius
        if at_goal:
            self.goal_reached = True
            v = w = 0.0
        else:
            prev = (self.robot.x, self.robot.y)
            self.robot, v, w = follow_path(
                self.robot, self.path, self.velocity, grid, cfg.dt, cfg.lookahead, cfg.planner_cfg.epsilon_f
            )
            self.traveled += math.hypot(self.robot.x - prev[0], self.robot.y - prev[1])
        if v == 0.0 and not self.goal_reached:
            self.idle += cfg.dt

        if self.agents:
            dmin = min(math.hypot(self.robot.x - a.x, self.robot.y - a.y) for a in self.agents)
            self.min_obstacle_distance = min(self.min_obstacle_distance, dmin)
            self._sum_obstacle_distance += dmin
            self._distance_steps += 1
            contact = dmin < cfg.robot_radius + cfg.obstacle_radius
            if contact and not self._in_contact:
                self.noncritical_contacts += 1
            if contact and v > 0.05:
                self._contact_streak += cfg.dt
            elif not contact:
                self._contact_streak = 0.0
            if self._contact_streak > 0.5:
                self.critical_events += 1
                self._contact_streak = 0.0
            self._in_contact = contact
        self.tick_index += 1
        self.sim_time = self.tick_index * cfg.dt

    # --- projections ---

    def metrics_so_far(self) -> dict:
        mean_d = (
            self._sum_obstacle_distance / self._distance_steps if self._distance_steps else math.inf
        )
        return {
            "sim_time": _clean(self.sim_time),
            "traveled_distance": _clean(self.traveled),
            "idle_time": _clean(self.idle),
            "min_obstacle_distance": _clean(self.min_obstacle_distance),
            "mean_obstacle_distance": _clean(mean_d),
            "replan_count": self.replan_count,
            "failed_plans": self.failed_plans,
            "noncritical_contacts": self.noncritical_contacts,
            "critical_events": self.critical_events,
            "goal_reached": self.goal_reached,
        }

    def snapshot(self) -> dict:
        return {
            "tick": self.tick_index,
            "sim_time": _clean(self.sim_time),
            "paused": self.paused,
            "seed": self.seed,
            "goal": [self.goal.x, self.goal.y],
            "robot": {"x": self.robot.x, "y": self.robot.y, "heading": self.robot.heading},
            "agents": [
                {"id": a.agent_id, "x": a.x, "y": a.y, "heading": a.heading} for a in self.agents
            ],
            "path": [] if self.path is None else [[float(x), float(y)] for x, y in self.path],
            "tr": None if self.tr_values is None else [_clean(float(v)) for v in self.tr_values],
            "perception": self.perception.mode,
            "last_plan_tick": self.last_plan_tick,
            "metrics": self.metrics_so_far(),
            "raster_ids": ["arrival", "velocity", "traversability", "clearance"],
        }

    def full_state(self) -> dict:
        grid = self.cfg.grid
        region_set = self.context.region_set
        graph = self.context.graph
        return {
            "map": {
                "width": grid.width,
                "height": grid.height,
                "resolution": grid.resolution,
                "origin": [grid.origin.x, grid.origin.y],
                "occupied_rle": _rle_encode(grid.occupied.ravel().astype(int).tolist()),
                "digest": grid.digest(),
            },
            "regions": {
                "n_regions": region_set.n_regions,
                "seeds": [[r.seed.col, r.seed.row, _clean(r.clearance)] for r in region_set.regions],
                "labels_rle": _rle_encode(region_set.labels.ravel().tolist()),
                "edges": [[i, j, length] for (i, j), length in sorted(graph.edge_lengths.items())],
            },
            "config": {
                "dt": self.cfg.dt,
                "replan_period": self.cfg.replan_period,
                "planner": self.cfg.planner,
                "perception": self.perception.mode,
                "robot_radius": self.cfg.robot_radius,
                "obstacle_radius": self.cfg.obstacle_radius,
            },
            "snapshot": self.snapshot(),
        }

    def raster(self, raster_id: str) -> Optional[dict]:
        grid = self.cfg.grid
        if raster_id == "arrival":
            values = self.arrival
        elif raster_id == "velocity":
            values = self.velocity
        elif raster_id == "traversability":
            values = None if self.tr_values is None else self.context.region_set.labels
            if values is not None:
                raster = np.zeros((grid.height, grid.width))
                inside = values >= 0
                raster[inside] = np.asarray(self.tr_values)[values[inside]]
                values = raster
        elif raster_id == "clearance":
            values = self.context.clearance
        else:
            return None
        if values is None:
            return None
        flat = [_clean(float(v)) for v in np.asarray(values, dtype=float).ravel()]
        return {"id": raster_id, "width": grid.width, "height": grid.height, "values": flat}


def replay_command_log(cfg: SimConfig, command_log: list, total_ticks: int,
                       context: Optional[PlanningContext] = None) -> list:
    """Re-run an interactive episode headlessly: apply the logged commands at
    their recorded ticks and advance the same number of ticks. Returns one
    snapshot per tick (paused periods occupy no ticks, so wall time drops
    out of the replay)."""
    session = InteractiveSession(cfg, context)
    by_tick: dict = {}
    for entry in command_log:
        by_tick.setdefault(entry["tick"], []).append(entry["command"])
    states = []
    for k in range(total_ticks):
        for command in by_tick.get(k, ()):
            if command.get("name") in ("pause", "resume"):
                continue
            session.apply_command(command, log=False)
        session.tick()
        states.append(session.snapshot())
    return states


# --- network layer ---

class _Server:
    def __init__(self, session: InteractiveSession, broadcast_period: float, pace: float):
        self.session = session
        self.broadcast_period = broadcast_period
        self.pace = pace
        self.clients: set = set()
        self.inbox: asyncio.Queue = asyncio.Queue()
        self.out_seq = 0

    def envelope(self, msg_type: str, payload: dict) -> str:
        self.out_seq += 1
        return json.dumps({"type": msg_type, "seq": self.out_seq, "payload": payload})

    async def handler(self, websocket):
        self.clients.add(websocket)
        try:
            await websocket.send(self.envelope("full_state", self.session.full_state()))
            async for raw in websocket:
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await websocket.send(self.envelope("error", {"of": None, "code": "BadMessage", "message": "not JSON"}))
                    continue
                await self.inbox.put((websocket, msg))
        finally:
            self.clients.discard(websocket)

    async def broadcast(self, text: str) -> None:
        for client in list(self.clients):
            try:
                await client.send(text)
            except Exception:
                self.clients.discard(client)

    async def _handle_message(self, websocket, msg) -> None:
        seq = msg.get("seq")
        payload = msg.get("payload") or {}
        if msg.get("type") == "command":
            try:
                result = self.session.apply_command(payload)
            except Exception as e:
                reply = self.envelope(
                    "error", {"of": seq, "code": type(e).__name__, "message": str(e)}
                )
            else:
                reply = self.envelope("ack", {"of": seq, "ok": True, "result": result})
            await websocket.send(reply)
        elif msg.get("type") == "get_raster":
            raster = self.session.raster(payload.get("id", ""))
            if raster is None:
                await websocket.send(
                    self.envelope("error", {"of": seq, "code": "UnknownRaster", "message": str(payload.get("id"))})
                )
            else:
                raster["of"] = seq
                await websocket.send(self.envelope("raster", raster))
        else:
            await websocket.send(
                self.envelope("error", {"of": seq, "code": "BadMessage", "message": f"unknown type {msg.get('type')!r}"})
            )

    async def owner_loop(self) -> None:
        """The single writer: applies commands between ticks, paces the sim,
        broadcasts snapshots."""
        loop = asyncio.get_running_loop()
        last_broadcast = loop.time()
        dt_wall = self.session.cfg.dt / max(self.pace, 1e-9)
        next_tick = loop.time()
        while True:
            # drain pending messages (commands apply at tick boundaries)
            while True:
                try:
                    websocket, msg = self.inbox.get_nowait()
                except asyncio.QueueEmpty:
                    break
                await self._handle_message(websocket, msg)
            now = loop.time()
            if not self.session.paused and now >= next_tick:
                self.session.tick()
                next_tick = max(next_tick + dt_wall, now - 0.25)  # don't spiral after stalls
            if now - last_broadcast >= self.broadcast_period:
                await self.broadcast(self.envelope("snapshot", self.session.snapshot()))
                last_broadcast = now
            await asyncio.sleep(min(dt_wall / 4, 0.01))


async def serve_async(
    cfg: SimConfig,
    host: str = "127.0.0.1",
    port: int = 8750,
    broadcast_period: float = 0.1,
    pace: float = 1.0,
    context: Optional[PlanningContext] = None,
    ready: Optional[asyncio.Event] = None,
):
    """Run the websocket service until cancelled."""
    import websockets

    session = InteractiveSession(cfg, context)
    server = _Server(session, broadcast_period, pace)
    try:
        ws_server = await websockets.serve(server.handler, host, port)
    except OSError as e:
        raise BindError(f"cannot bind {host}:{port}: {e}") from e
    if ready is not None:
        ready.set()
    try:
        await server.owner_loop()
    finally:
        ws_server.close()
        await ws_server.wait_closed()


def serve_blocking(cfg: SimConfig, host: str, port: int, pace: float = 1.0,
                   broadcast_period: float = 0.1) -> None:
    print(f"serving interactive episode on ws://{host}:{port} (paused; send resume to start)")
    try:
        asyncio.run(serve_async(cfg, host, port, broadcast_period, pace))
    except KeyboardInterrupt:
        pass
