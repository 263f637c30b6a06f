#pragma once

// Twelve hand-written machine traces, each an independently derived
// state/action/emission sequence checked exactly. Shared between the unit
// tests and the acceptance runner.

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "jade/csm.hpp"

namespace jade::traces {

struct TraceResult {
    std::string name;
    bool pass = true;
    std::string detail;  // first mismatch, empty when pass
};

class TraceCheck {
public:
    explicit TraceCheck(TraceResult& r) : r_(r) {}

    void require(bool cond, const std::string& what) {
        if (!cond && r_.pass) {
            r_.pass = false;
            r_.detail = what;
        }
    }

    void equal_states(const std::vector<CsmMachine>& ms, const std::vector<std::string>& want) {
        for (std::size_t i = 0; i < ms.size() && i < want.size(); ++i)
            require(ms[i].current == want[i],
                    "machine " + ms[i].name + " in state " + ms[i].current + ", expected " +
                        want[i]);
        require(ms.size() == want.size(), "machine count mismatch");
    }

private:
    TraceResult& r_;
};

inline std::vector<CsmMachine> must_parse(const std::string& text, TraceCheck& check) {
    auto res = parse_csm(text);
    check.require(!has_errors(res.diags), "trace machine failed to parse: " +
                                              format_diagnostics(res.diags));
    return res.machines;
}

inline EventSet ev(std::initializer_list<const char*> names) {
    EventSet out;
    for (const char* n : names) out.push_back({n, {}, EventOrigin::Sensor});
    return out;
}

inline std::vector<TraceResult> run_all() {
    std::vector<TraceResult> results;
    auto trace = [&](const char* name, const std::function<void(TraceCheck&)>& body) {
        TraceResult r;
        r.name = name;
        TraceCheck check(r);
        try {
            body(check);
        } catch (const std::exception& ex) {
            check.require(false, std::string("unexpected exception: ") + ex.what());
        }
        results.push_back(std::move(r));
    };

    // 1. A single transition fires once and the machine then sits in a state
    //    with no outgoing edges.
    trace("basic-transition", [](TraceCheck& check) {
        auto ms = must_parse("machine m { initial A; state A { on GO -> B; } state B {} }",
                             check);
        Memory mem;
        auto r1 = csm_step(ms, ev({"GO"}), mem);
        check.require(r1.fired == 1, "expected one firing");
        check.equal_states(ms, {"B"});
        auto r2 = csm_step(ms, ev({"GO"}), mem);
        check.require(r2.fired == 0, "B has no transitions, nothing may fire");
        check.require(r2.actions.empty(), "no actions from a silent step");
        check.equal_states(ms, {"B"});
    });

    // 2. A false guard blocks the transition; flipping the memory variable
    //    unblocks it.
    trace("guard-blocks", [](TraceCheck& check) {
        auto ms = must_parse(
            "machine m { initial A; state A { on GO if x < 1 -> B; } state B {} }", check);
        Memory mem;
        mem.set("x", 2);
        auto r1 = csm_step(ms, ev({"GO"}), mem);
        check.require(r1.fired == 0, "guard x<1 must block at x=2");
        check.equal_states(ms, {"A"});
        mem.set("x", 0);
        auto r2 = csm_step(ms, ev({"GO"}), mem);
        check.require(r2.fired == 1, "guard must pass at x=0");
        check.equal_states(ms, {"B"});
    });

    // 3. Two enabled transitions from the same state: the first declared wins.
    trace("declaration-order-tie-break", [](TraceCheck& check) {
        auto ms = must_parse("machine m { initial A; state A {"
                             " on GO -> B do assign(first, 1);"
                             " on GO -> C do assign(second, 1); }"
                             " state B {} state C {} }",
                             check);
        Memory mem;
        auto r = csm_step(ms, ev({"GO"}), mem);
        check.require(r.fired == 1, "exactly one transition per machine per step");
        check.equal_states(ms, {"B"});
        check.require(mem.has("first") && !mem.has("second"),
                      "only the first declared transition may act");
    });

    // 4. Same-step isolation: an emitted event is invisible until the next
    //    step, then triggers.
    trace("same-step-isolation", [](TraceCheck& check) {
        auto ms = must_parse("machine a { initial A; state A { on GO -> A2 do emit(X); }"
                             " state A2 {} }\n"
                             "machine b { initial B; state B { on X -> B2; } state B2 {} }",
                             check);
        Memory mem;
        auto r1 = csm_step(ms, ev({"GO"}), mem);
        check.require(r1.fired == 1, "only machine a fires on GO");
        check.equal_states(ms, {"A2", "B"});
        check.require(r1.emitted.size() == 1 && r1.emitted[0].name == "X",
                      "X must be buffered, not applied");
        auto r2 = csm_step(ms, r1.emitted, mem);
        check.require(r2.fired == 1, "machine b fires on the buffered X");
        check.equal_states(ms, {"A2", "B2"});
    });

    // 5. ANY matches any nonempty event set and never an empty one.
    trace("any-wildcard", [](TraceCheck& check) {
        auto ms = must_parse("machine m { initial A; state A { on ANY -> B; } state B {"
                             " on ANY -> A; } }",
                             check);
        Memory mem;
        auto r0 = csm_step(ms, {}, mem);
        check.require(r0.fired == 0, "ANY must not match an empty event set");
        check.equal_states(ms, {"A"});
        auto r1 = csm_step(ms, ev({"WHATEVER"}), mem);
        check.require(r1.fired == 1, "ANY matches any event");
        check.equal_states(ms, {"B"});
        auto r2 = csm_step(ms, ev({"TICK"}), mem);
        check.equal_states(ms, {"A"});
        check.require(r2.fired == 1, "ANY matches TICK too");
    });

    // 6. A TICK-driven loop fires every step the runtime injects TICK.
    trace("tick-loop", [](TraceCheck& check) {
        auto ms = must_parse("machine m { initial A; state A { on TICK -> A do"
                             " assign(n, n + 1); } }",
                             check);
        Memory mem;
        mem.set("n", 0);
        for (int i = 0; i < 5; ++i) csm_step(ms, ev({"TICK"}), mem);
        check.require(mem.get("n") == 5.0, "one increment per TICK");
        csm_step(ms, ev({"OTHER"}), mem);
        check.require(mem.get("n") == 5.0, "no TICK, no increment");
    });

    // 7. Independent machines triggered by one event all fire; actions come
    //    back concatenated in machine-declaration order.
    trace("synchronous-composition", [](TraceCheck& check) {
        auto ms = must_parse(
            "machine one { initial A; state A { on GO -> A do set_wheels(1, 1); } }\n"
            "machine two { initial B; state B { on GO -> B do set_wheels(2, 2); } }",
            check);
        Memory mem;
        auto r = csm_step(ms, ev({"GO"}), mem);
        check.require(r.fired == 2, "both machines fire");
        check.require(r.actions.size() == 2, "two actions expected");
        check.require(r.actions[0].x == 1 && r.actions[1].x == 2,
                      "actions must follow machine declaration order");
    });

    // 8. Scalar payload: usable in the guard and in actions of the fired
    //    transition.
    trace("payload-scalar", [](TraceCheck& check) {
        auto ms = must_parse("machine m { initial A; state A {"
                             " on RANGE if payload < 0.5 -> A do assign(seen, payload); } }",
                             check);
        Memory mem;
        EventSet far{{"RANGE", EventPayload{0.7}, EventOrigin::Sensor}};
        auto r1 = csm_step(ms, far, mem);
        check.require(r1.fired == 0, "payload 0.7 fails the guard");
        EventSet near{{"RANGE", EventPayload{0.3}, EventOrigin::Sensor}};
        auto r2 = csm_step(ms, near, mem);
        check.require(r2.fired == 1, "payload 0.3 passes the guard");
        check.require(mem.get("seen") == 0.3, "payload must flow into assign");
    });

    // 9. Position payload via payload_x / payload_y.
    trace("payload-position", [](TraceCheck& check) {
        auto ms = must_parse("machine m { initial A; state A { on TARGET -> A do"
                             " assign(tx, payload_x), assign(ty, payload_y); } }",
                             check);
        Memory mem;
        EventSet events{{"TARGET", EventPayload{Vec2{3.5, -1.25}}, EventOrigin::Strategy}};
        csm_step(ms, events, mem);
        check.require(mem.get("tx") == 3.5 && mem.get("ty") == -1.25,
                      "position payload components must be addressable");
    });

    // 10. assign() is visible to every later action in the concatenated
    //     sequence, across machine boundaries.
    trace("assign-sequencing", [](TraceCheck& check) {
        auto ms = must_parse(
            "machine one { initial A; state A { on GO -> A do assign(a, 1),"
            " assign(b, a + 1); } }\n"
            "machine two { initial B; state B { on GO -> B do assign(c, a + 10); } }",
            check);
        Memory mem;
        mem.set("a", 100);  // pre-step value, must be overwritten before b and c evaluate
        csm_step(ms, ev({"GO"}), mem);
        check.require(mem.get("a") == 1.0, "a reassigned");
        check.require(mem.get("b") == 2.0, "b sees the fresh a within the same machine");
        check.require(mem.get("c") == 11.0, "c sees the fresh a across machines");
    });

    // 11. Guards evaluate against pre-step memory: another machine's assign
    //     in the same step cannot enable a transition until the next step.
    trace("pre-step-guard-snapshot", [](TraceCheck& check) {
        auto ms = must_parse(
            "machine writer { initial W; state W { on GO -> W do assign(x, 5); } }\n"
            "machine reader { initial A; state A { on GO if x == 5 -> B; } state B {} }",
            check);
        Memory mem;
        mem.set("x", 0);
        auto r1 = csm_step(ms, ev({"GO"}), mem);
        check.require(r1.fired == 1, "only the writer fires in step one");
        check.equal_states(ms, {"W", "A"});
        auto r2 = csm_step(ms, ev({"GO"}), mem);
        check.require(r2.fired == 2, "reader sees x==5 in step two");
        check.equal_states(ms, {"W", "B"});
    });

    // 12. Three-state TICK cycle stepped 7 times lands where modular
    //     arithmetic says, having fired exactly once per step.
    trace("cycle-program", [](TraceCheck& check) {
        auto ms = must_parse("machine m { initial A;"
                             " state A { on TICK -> B do set_wheels(1, 0); }"
                             " state B { on TICK -> C do set_wheels(0, 1); }"
                             " state C { on TICK -> A do set_wheels(1, 1); } }",
                             check);
        Memory mem;
        const char* expected[] = {"B", "C", "A", "B", "C", "A", "B"};
        double expected_left[] = {1, 0, 1, 1, 0, 1, 1};
        for (int i = 0; i < 7; ++i) {
            auto r = csm_step(ms, ev({"TICK"}), mem);
            check.require(r.fired == 1, "exactly one firing per step");
            check.require(ms[0].current == expected[i], "cycle state mismatch");
            check.require(r.actions.size() == 1 && r.actions[0].kind == ActionKind::SetWheels &&
                              r.actions[0].x == expected_left[i],
                          "wheel command mismatch in cycle");
        }
    });

    return results;
}

}  // namespace jade::traces
