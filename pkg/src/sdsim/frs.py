"""The fashion-recommender bias model, built in code, plus scenario presets.

``build_frs_model()`` must stay semantically identical to ``models/frs.sdl``;
the test suite compares the two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import UnknownPreset
from .expr import emax, integ, random_normal, ref
from .model import ModelSpec, VariableDef, make_model
from .units import parse_units

STOCKS = (
    "Distribution of Bias in Data & Design",
    "FRE",
    "HCI",
    "Performance",
)
QUALITY = "Avg Quality"
BIAS_STOCK = "Distribution of Bias in Data & Design"
BIAS_INFLOW = "New Processing Rate"
DEBIAS_OUTFLOW = "Debiasing in Research & Model Training"
COEFFICIENT = "Coefficient of Bias Distribution & Skewness"

CONSTANTS = {
    "Accuracy": (1, "Dmnl"),
    "ATOP": (1, "bias"),
    "Avg Interaction Life": (6760, "Day"),
    "Avg. new recommendations": (26000, "recommendations"),
    "Avg. New Users per. Items": (1.74, "1/Day"),
    "Desired Interactions": (26000, "interactions"),
    "Inductive Bias": (1, "bias"),
    "Label observation Randomness": (1, "Dmnl"),
    "Lifecycle": (180, "Day"),
    "Median Conversion Rate": (2.4, "1/(Day*interactions)"),
    "New Modeling": (1, "interactions"),
    "Popularity Bias": (1, "bias"),
    "Propensity Score": (1, "bias"),
    "Rebalancing & Regularization": (0, "bias"),
    "Relative Bias": (1, "bias"),
    "Seed": (1, "Dmnl"),
    "Skewness": (1, "quality"),
    "Time to Adjust Interactions": (6760, "Day"),
    "Time to Debias": (1, "Day"),
    "User Bias": (1, "bias"),
}

INITIAL_STOCKS = {
    "Distribution of Bias in Data & Design": 1.0,
    "FRE": 5.0,
    "HCI": 10.0,
    "Performance": 1.0,
}

# (distribution, skewness, relative bias) per bias distribution scenario
DISTRIBUTION_TABLE = (
    ("Exponential", 4.57, 0.07),
    ("Log Normal", 2.81, 0.14),
    ("Gamma with alpha = 2", 2.81, 0.19),
    ("Gamma with alpha = 4", 2.04, 0.21),
)


def _listing():
    """(name, expression, units, doc, range) in listing order."""
    c = {name: value for name, (value, _) in CONSTANTS.items()}
    r = ref
    const = lambda name: (name, c[name], CONSTANTS[name][1], None, None)  # noqa: E731
    return [
        const("Accuracy"),
        const("ATOP"),
        const("Avg Interaction Life"),
        ("Avg Interactions with Recommendations", r("FRE") / r("HCI"), "recommendations/interactions", None, None),
        ("Avg Quality", r("Performance") / r("FRE"), "quality/recommendations", None, None),
        const("Avg. new recommendations"),
        const("Avg. New Users per. Items"),
        (COEFFICIENT, r("Skewness") / r("Relative Bias"), "quality/bias", None, None),
        (DEBIAS_OUTFLOW, r("Rebalancing & Regularization") / (r("New Modeling") * r("Time to Debias")),
         "bias/(interactions*Day)", None, None),
        const("Desired Interactions"),
        (BIAS_STOCK, integ(r(BIAS_INFLOW) - r(DEBIAS_OUTFLOW), 1), "bias/interactions", None, None),
        ("Effect of Interaction on New Recommendations", r("HCI") * r("Median Conversion Rate"), "1/Day", None, None),
        ("Effect of Rating on Interactions with Recommendations",
         r("Effects of User Bias on Rating") / r("Avg Interactions with Recommendations"),
         "interactions/(recommendations*bias)", None, None),
        ("Effects of Debiasing on Skeweness", r("ATOP") + r("Propensity Score"), "bias", None, None),
        ("Effects of User Bias on Rating", 1 / r("User Bias"), "1/bias", None, None),
        ("FINAL TIME", 100, "Day", "The final time for the simulation.", None),
        ("FRE", integ(r("Increased Recommendations") - r("Removed Recommendations"), 5), "recommendations", None, None),
        ("HCI", integ(r("Interaction Increased Rate") - r("Interaction Decrease Rate"), 10), "interactions", None, None),
        ("Increased Quality", r("Quality of each new Recommendations") * r("Increased Recommendations"),
         "quality/Day", None, None),
        ("Increased Recommendations",
         r("Effect of Interaction on New Recommendations") * r("Avg. new recommendations"),
         "recommendations/Day", None, None),
        const("Inductive Bias"),
        ("INITIAL TIME", 0, "Day", "The initial time for the simulation.", None),
        ("Interaction Decrease Rate", r("HCI") / r("Avg Interaction Life"), "interactions/Day", None, None),
        ("Interaction Increased Rate",
         emax(0, (r("Desired Interactions") - r("HCI")) / r("Time to Adjust Interactions")
              + r("Interaction Decrease Rate")),
         "interactions/Day", None, None),
        const("Label observation Randomness"),
        const("Lifecycle"),
        const("Median Conversion Rate"),
        const("New Modeling"),
        (BIAS_INFLOW,
         (r("Inductive Bias") + r("Popularity Bias")) * r("Avg. New Users per. Items") / r("HCI")
         * r("Label observation Randomness"),
         "bias/(interactions*Day)", None, None),
        ("Performance", integ(r("Increased Quality") - r("Removed Quality"), 1), "quality", None, None),
        const("Popularity Bias"),
        const("Propensity Score"),
        ("Quality of each new Recommendations",
         random_normal(1, 5, r("Accuracy") * r(QUALITY), r("Skewed Patterns in Model"), r("Seed")),
         "quality/recommendations", None, None),
        const("Rebalancing & Regularization"),
        const("Relative Bias"),
        ("Removed Quality", r(QUALITY) * r("Removed Recommendations"), "quality/Day", None, None),
        ("Removed Recommendations",
         r("FRE") / r("Lifecycle") + r("Avg Interactions with Recommendations") * r("Interaction Decrease Rate"),
         "recommendations/Day", None, None),
        ("SAVEPER", r("TIME STEP"), "Day", "The frequency with which output is stored.", (0.0, None)),
        const("Seed"),
        ("Skewed Patterns in Model",
         (r("Effects of Debiasing on Skeweness") * r("Effect of Rating on Interactions with Recommendations"))
         * (r(BIAS_STOCK) * r(COEFFICIENT)),
         "quality/recommendations", None, None),
        const("Skewness"),
        ("TIME STEP", 0.0078125, "Day", "The time step for the simulation.", (0.0, None)),
        const("Time to Adjust Interactions"),
        const("Time to Debias"),
        const("User Bias"),
    ]


def build_frs_model() -> ModelSpec:
    from .expr import as_expr

    defs = []
    for i, (name, expr, units, doc, rng) in enumerate(_listing(), start=1):
        defs.append(VariableDef(name=name, expr=as_expr(expr) if not isinstance(expr, str) else expr,
                                units=parse_units(units), range=rng, doc=doc, index=i))
    return make_model(defs)


def frs_source() -> str:
    """Text of the shipped ``frs.sdl`` corpus file."""
    return resources.files("sdsim").joinpath("models/frs.sdl").read_text(encoding="utf-8")


def load_frs_model() -> ModelSpec:
    from .parser import parse_model

    return parse_model(frs_source()).unwrap()


# -- presets -------------------------------------------------------------------


@dataclass(frozen=True)
class Preset:
    name: str
    overrides: dict[str, float] = field(default_factory=dict)
    description: str = ""


_X5 = {"Inductive Bias": 5.0, "Popularity Bias": 5.0, "User Bias": 5.0}
_RESEARCH = {**_X5, "Rebalancing & Regularization": 5.0}
_FULL = {**_RESEARCH, "ATOP": 5.0, "Propensity Score": 5.0}

PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        Preset("base", {}, "all bias constants at 1; no debiasing"),
        Preset("inductive-x2", {"Inductive Bias": 2.0}, "inductive bias doubled"),
        Preset("user-x2", {"User Bias": 2.0}, "user bias doubled"),
        Preset("all-bias-x5", dict(_X5), "inductive, popularity and user bias at five times base"),
        Preset("intervention-research", dict(_RESEARCH),
               "all-bias-x5 plus rebalancing & regularization at 5"),
        Preset("intervention-full", dict(_FULL),
               "intervention-research plus ATOP and propensity scores at 5"),
        Preset("dist-exponential", {"Skewness": 4.57, "Relative Bias": 0.07}, "exponential bias distribution"),
        Preset("dist-lognormal", {"Skewness": 2.81, "Relative Bias": 0.14}, "log-normal bias distribution"),
        Preset("dist-gamma2", {"Skewness": 2.81, "Relative Bias": 0.19}, "gamma bias distribution, alpha = 2"),
        Preset("dist-gamma4", {"Skewness": 2.04, "Relative Bias": 0.21}, "gamma bias distribution, alpha = 4"),
    ]
}


def preset(name: str) -> Preset:
    try:
        p = PRESETS[name]
    except KeyError:
        raise UnknownPreset(name) from None
    return Preset(p.name, dict(p.overrides), p.description)


def coefficient(p: Preset, model: Optional[ModelSpec] = None) -> float:
    """Skewness / Relative Bias under the preset's overrides."""
    skew = p.overrides.get("Skewness", CONSTANTS["Skewness"][0])
    rel = p.overrides.get("Relative Bias", CONSTANTS["Relative Bias"][0])
    return skew / rel
