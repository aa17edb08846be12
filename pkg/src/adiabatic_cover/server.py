"""
MCP server for adiabatic Exact Cover experiments.

Exposes single-instance operations via Model Context Protocol:
- exact_cover_generate: Random GUSA or fixed-clause instance
- exact_cover_analyze: Classical facts and, for small n, the spectral gap
- exact_cover_evolve: Success probability after evolving for time T
- exact_cover_find_time: Run time with success probability in a band
- exact_cover_amplify: Success after k repetitions, repetitions for a target

Ensemble sweeps are left to the command line.
"""
import asyncio
import json
import logging
import sys
from typing import Any

import numpy as np
from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import (
    CallToolResult,
    ListToolsResult,
    TextContent,
    Tool,
)

from .config import Settings
from .evolution import (
    EvolutionConfig,
    StepControl,
    amplified_success,
    calibrate_step,
    evolve,
    expected_repetitions,
    repetitions_for,
    success_probability,
)
from .experiments import BAND_HI, BAND_LO, T_MAX, find_time_for_band, success_targets
from .hamiltonian import MAX_DENSE_BITS, build, gap_scan
from .instance import ExactCoverInstance, generate_fixed_clauses, generate_gusa, instance_summary

logger = logging.getLogger("adiabatic-cover")

_INSTANCE_SCHEMA = {
    "type": "object",
    "description": 'Instance as {"n": bits, "clauses": [[i, j, k], ...]} with 0 <= i < j < k < n',
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "clauses": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3},
        },
    },
    "required": ["n", "clauses"],
}

_STEP_SCHEMA = {
    "type": "string",
    "enum": ["fixed", "adaptive"],
    "default": "fixed",
    "description": "fixed: RK4 with dt = min(0.01, 1/(4 E_max)); adaptive: DOP853",
}

# Tool definitions
TOOLS = [
    Tool(
        name="exact_cover_generate",
        description="""Generate a random Exact Cover instance.

Each clause asks that exactly one of three bits is 1.
- gusa: clauses are added until exactly one assignment satisfies them all
- fixed: exactly m distinct random clauses (may be unsatisfiable)""",
        inputSchema={
            "type": "object",
            "properties": {
                "n": {"type": "integer", "minimum": 3, "maximum": 24, "description": "Number of bits"},
                "mode": {"type": "string", "enum": ["gusa", "fixed"], "default": "gusa"},
                "m": {"type": "integer", "minimum": 0, "description": "Clause count (fixed mode)"},
                "seed": {"type": "integer", "minimum": 0, "default": 0},
            },
            "required": ["n"],
        },
    ),
    Tool(
        name="exact_cover_analyze",
        description="""Classical facts about an instance: satisfying count, minimal violations,
free bits. For n <= 10 optionally scans the minimum gap of H(s).""",
        inputSchema={
            "type": "object",
            "properties": {
                "instance": _INSTANCE_SCHEMA,
                "gap_points": {
                    "type": "integer",
                    "minimum": 2,
                    "description": "Number of s values for a gap scan (omit to skip)",
                },
            },
            "required": ["instance"],
        },
    ),
    Tool(
        name="exact_cover_evolve",
        description="Evolve the uniform superposition for time T and report the success probability.",
        inputSchema={
            "type": "object",
            "properties": {
                "instance": _INSTANCE_SCHEMA,
                "T": {"type": "number", "minimum": 0, "description": "Run time"},
                "step_control": _STEP_SCHEMA,
                "norm_tolerance": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["instance", "T"],
        },
    ),
    Tool(
        name="exact_cover_find_time",
        description="""Find a run time whose success probability lies in [band_lo, band_hi].

Doubles T from 1 until the band is reached, then bisects.""",
        inputSchema={
            "type": "object",
            "properties": {
                "instance": _INSTANCE_SCHEMA,
                "band_lo": {"type": "number", "default": BAND_LO},
                "band_hi": {"type": "number", "default": BAND_HI},
                "t_max": {"type": "number", "default": T_MAX},
                "step_control": _STEP_SCHEMA,
            },
            "required": ["instance"],
        },
    ),
    Tool(
        name="exact_cover_amplify",
        description="Success probability after k independent runs, or the runs needed to reach a target.",
        inputSchema={
            "type": "object",
            "properties": {
                "p": {"type": "number", "minimum": 0, "maximum": 1},
                "k": {"type": "integer", "minimum": 1},
                "target": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
            "required": ["p"],
        },
    ),
]


def _evolution_config(arguments: dict[str, Any], total_time: float = 0.0) -> EvolutionConfig:
    settings = Settings.from_env()
    return EvolutionConfig(
        total_time=total_time,
        step_control=StepControl(kind=arguments.get("step_control", "fixed")),
        norm_tolerance=arguments.get("norm_tolerance", settings.norm_tolerance),
    )


def _text(payload: Any) -> CallToolResult:
    return CallToolResult(content=[TextContent(type="text", text=json.dumps(payload, indent=2))])


async def handle_tool_call(name: str, arguments: dict[str, Any]) -> CallToolResult:
    """Handle a tool call and return the result."""
    try:
        if name == "exact_cover_generate":
            rng = np.random.default_rng(arguments.get("seed", 0))
            if arguments.get("mode", "gusa") == "gusa":
                inst = generate_gusa(arguments["n"], rng)
            else:
                inst = generate_fixed_clauses(arguments["n"], arguments.get("m", 0), rng)
            return _text({"instance": inst.to_dict(), "summary": instance_summary(inst)})

        elif name == "exact_cover_analyze":
            inst = ExactCoverInstance.from_dict(arguments["instance"])
            result = instance_summary(inst)
            points = arguments.get("gap_points")
            if points is not None:
                if inst.n > MAX_DENSE_BITS:
                    return _text({**result, "gap": f"gap scan needs n <= {MAX_DENSE_BITS}"})
                profile = gap_scan(build(inst), points)
                result["gap"] = {"s_min": profile.s_min, "g_min": profile.g_min}
            return _text(result)

        elif name == "exact_cover_evolve":
            inst = ExactCoverInstance.from_dict(arguments["instance"])
            targets, min_violations = success_targets(inst)
            hd = build(inst)
            cfg = _evolution_config(arguments, float(arguments["T"]))
            if cfg.step_control.kind == "fixed" and cfg.total_time > 0:
                cfg = calibrate_step(hd, cfg)
            psi = evolve(hd, cfg)
            p = success_probability(psi, targets)
            return _text({
                "T": arguments["T"],
                "probability": p,
                "targets": int(targets.size),
                "min_violations": min_violations,
                "integrator": psi.stats.to_dict() if psi.stats else None,
            })

        elif name == "exact_cover_find_time":
            inst = ExactCoverInstance.from_dict(arguments["instance"])
            found = find_time_for_band(
                inst,
                p_lo=arguments.get("band_lo", BAND_LO),
                p_hi=arguments.get("band_hi", BAND_HI),
                cfg=_evolution_config(arguments),
                t_max=arguments.get("t_max", T_MAX),
            )
            return _text({
                "T": found.total_time,
                "probability": found.probability,
                "flag": found.flag,
                "probes": [list(p) for p in found.probes],
            })

        elif name == "exact_cover_amplify":
            p = arguments["p"]
            result: dict[str, Any] = {"p": p}
            if p > 0:
                result["expected_repetitions"] = expected_repetitions(p)
            if "k" in arguments:
                result["k"] = arguments["k"]
                result["amplified"] = amplified_success(p, arguments["k"])
            if "target" in arguments:
                result["target"] = arguments["target"]
                result["repetitions"] = repetitions_for(p, arguments["target"])
            return _text(result)

        else:
            return CallToolResult(
                content=[TextContent(type="text", text=f"Unknown tool: {name}")]
            )

    except Exception as e:
        logger.exception("Error handling tool %s", name)
        return CallToolResult(
            content=[TextContent(type="text", text=f"Error: {e}")]
        )


async def run_server():
    """Run the MCP server."""
    server = Server("adiabatic-cover")

    @server.list_tools()
    async def list_tools() -> ListToolsResult:
        return ListToolsResult(tools=TOOLS)

    @server.call_tool()
    async def call_tool(name: str, arguments: dict[str, Any]) -> CallToolResult:
        return await handle_tool_call(name, arguments)

    logger.info("Starting adiabatic-cover tool server...")
    async with stdio_server() as (read_stream, write_stream):
        await server.run(read_stream, write_stream, server.create_initialization_options())


def main():
    """Entry point for the MCP server."""
    logging.basicConfig(level=Settings.from_env().logging_level, stream=sys.stderr)
    asyncio.run(run_server())


if __name__ == "__main__":
    main()
