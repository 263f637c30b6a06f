#include <cmath>
#include <deque>
#include <set>

#include "jade/csm.hpp"

namespace jade {

namespace {

struct Value {
    bool is_bool = false;
    double num = 0;
    bool truth = false;
};

[[noreturn]] void type_error(const Expr& e, const char* need) {
    throw CsmError(std::string("expression yields the wrong type, need ") + need, e.line, e.col);
}

Value eval(const Expr& e, const Memory& memory, const EventPayload* payload) {
    auto number = [&](const ExprPtr& p) {
        Value v = eval(*p, memory, payload);
        if (v.is_bool) type_error(*p, "a number");
        return v.num;
    };
    auto boolean = [&](const ExprPtr& p) {
        Value v = eval(*p, memory, payload);
        if (!v.is_bool) type_error(*p, "a condition");
        return v.truth;
    };
    auto num_result = [](double d) { return Value{false, d, false}; };
    auto bool_result = [](bool b) { return Value{true, 0, b}; };

    switch (e.op) {
        case Expr::Op::Num: return num_result(e.num);
        case Expr::Op::Var: {
            auto v = memory.get(e.var);
            if (!v) throw CsmError("read of unset variable '" + e.var + "'", e.line, e.col);
            return num_result(*v);
        }
        case Expr::Op::Payload: {
            if (!payload || std::holds_alternative<std::monostate>(*payload))
                throw CsmError("event carries no payload", e.line, e.col);
            if (const double* d = std::get_if<double>(payload)) return num_result(*d);
            throw CsmError("payload is a position; use payload_x / payload_y", e.line, e.col);
        }
        case Expr::Op::PayloadX:
        case Expr::Op::PayloadY: {
            if (!payload || !std::holds_alternative<Vec2>(*payload))
                throw CsmError("event carries no position payload", e.line, e.col);
            const Vec2& v = std::get<Vec2>(*payload);
            return num_result(e.op == Expr::Op::PayloadX ? v.x : v.y);
        }
        case Expr::Op::Add: return num_result(number(e.a) + number(e.b));
        case Expr::Op::Sub: return num_result(number(e.a) - number(e.b));
        case Expr::Op::Mul: return num_result(number(e.a) * number(e.b));
        case Expr::Op::Div: {
            double lhs = number(e.a), rhs = number(e.b);
            if (rhs == 0) throw CsmError("division by zero", e.line, e.col);
            return num_result(lhs / rhs);
        }
        case Expr::Op::Neg: return num_result(-number(e.a));
        case Expr::Op::Lt: return bool_result(number(e.a) < number(e.b));
        case Expr::Op::Le: return bool_result(number(e.a) <= number(e.b));
        case Expr::Op::Gt: return bool_result(number(e.a) > number(e.b));
        case Expr::Op::Ge: return bool_result(number(e.a) >= number(e.b));
        case Expr::Op::Eq: return bool_result(number(e.a) == number(e.b));
        case Expr::Op::Ne: return bool_result(number(e.a) != number(e.b));
        // Both operands always evaluate; guards stay order-independent.
        case Expr::Op::And: {
            bool lhs = boolean(e.a), rhs = boolean(e.b);
            return bool_result(lhs && rhs);
        }
        case Expr::Op::Or: {
            bool lhs = boolean(e.a), rhs = boolean(e.b);
            return bool_result(lhs || rhs);
        }
        case Expr::Op::Not: return bool_result(!boolean(e.a));
        case Expr::Op::Min: return num_result(std::min(number(e.a), number(e.b)));
        case Expr::Op::Max: return num_result(std::max(number(e.a), number(e.b)));
        case Expr::Op::Abs: return num_result(std::abs(number(e.a)));
    }
    throw CsmError("corrupt expression node", e.line, e.col);
}

}  // namespace

double eval_number(const Expr& e, const Memory& memory, const EventPayload* payload) {
    Value v = eval(e, memory, payload);
    if (v.is_bool) type_error(e, "a number");
    return v.num;
}

bool eval_condition(const Expr& e, const Memory& memory, const EventPayload* payload) {
    Value v = eval(e, memory, payload);
    if (!v.is_bool) type_error(e, "a condition");
    return v.truth;
}

CsmStepResult csm_step(std::vector<CsmMachine>& machines, const EventSet& events,
                       Memory& memory) {
    struct Selection {
        CsmMachine* machine;
        const Transition* transition;
        EventPayload payload;  // of the matched instance; monostate for ANY
    };
    std::vector<Selection> selected;

    // Selection phase: every machine decides against the same pre-step memory.
    for (auto& m : machines) {
        for (const auto& t : m.transitions) {
            if (t.source != m.current) continue;
            EventPayload payload{};
            if (t.trigger == kAnyTrigger) {
                if (events.empty()) continue;
            } else {
                const EventInstance* hit = find_event(events, t.trigger);
                if (!hit) continue;
                payload = hit->payload;
            }
            if (t.guard) {
                const EventPayload* p =
                    std::holds_alternative<std::monostate>(payload) ? nullptr : &payload;
                if (!eval_condition(*t.guard, memory, p)) continue;
            }
            selected.push_back({&m, &t, payload});
            break;  // at most one transition per machine per step
        }
    }

    // Execution phase: actions run concatenated in machine order; assign()
    // takes effect immediately for the actions after it.
    CsmStepResult result;
    result.fired = int(selected.size());
    for (auto& sel : selected) {
        sel.machine->current = sel.transition->target;
        const EventPayload* p =
            std::holds_alternative<std::monostate>(sel.payload) ? nullptr : &sel.payload;
        for (const auto& a : sel.transition->actions) {
            ActionCommand cmd;
            cmd.kind = a.kind;
            cmd.name = a.target;
            switch (a.kind) {
                case ActionKind::SetWheels:
                    cmd.x = eval_number(*a.args[0], memory, p);
                    cmd.y = eval_number(*a.args[1], memory, p);
                    break;
                case ActionKind::Assign:
                    cmd.x = eval_number(*a.args[0], memory, p);
                    memory.set(a.target, cmd.x);
                    break;
                case ActionKind::Send:
                    cmd.x = eval_number(*a.args[0], memory, p);
                    break;
                case ActionKind::Emit:
                    result.emitted.push_back({a.target, {}, EventOrigin::Machine});
                    break;
                case ActionKind::Pick:
                case ActionKind::Drop:
                    break;
            }
            result.actions.push_back(std::move(cmd));
        }
    }
    return result;
}

namespace {

void collect_vars(const Expr& e, std::vector<const Expr*>& out) {
    if (e.op == Expr::Op::Var) out.push_back(&e);
    if (e.a) collect_vars(*e.a, out);
    if (e.b) collect_vars(*e.b, out);
}

}  // namespace

Diagnostics validate_csm(const std::vector<CsmMachine>& machines, const CsmScope& scope) {
    Diagnostics diags;

    std::set<std::string> producible = scope.events;
    producible.insert(kTickEvent);
    producible.insert(kMsgEvent);
    std::set<std::string> assignable = scope.variables;
    for (const auto& m : machines)
        for (const auto& t : m.transitions)
            for (const auto& a : t.actions) {
                if (a.kind == ActionKind::Emit) producible.insert(a.target);
                if (a.kind == ActionKind::Assign) assignable.insert(a.target);
            }

    for (const auto& m : machines) {
        // Reachability from the initial state along transition edges.
        std::set<std::string> reachable{m.initial};
        std::deque<std::string> frontier{m.initial};
        while (!frontier.empty()) {
            std::string s = frontier.front();
            frontier.pop_front();
            for (const auto& t : m.transitions)
                if (t.source == s && reachable.insert(t.target).second)
                    frontier.push_back(t.target);
        }
        for (std::size_t i = 0; i < m.states.size(); ++i)
            if (!reachable.count(m.states[i]))
                diags.push_back({Severity::Warning, "unreachable-state",
                                 "state '" + m.states[i] + "' in machine '" + m.name +
                                     "' cannot be reached from '" + m.initial + "'",
                                 m.state_locs[i].first, m.state_locs[i].second});

        for (const auto& t : m.transitions) {
            if (t.trigger != kAnyTrigger && !producible.count(t.trigger))
                diags.push_back({Severity::Warning, "unknown-trigger",
                                 "no declared source produces event '" + t.trigger + "'",
                                 t.line, t.col});
            std::vector<const Expr*> vars;
            if (t.guard) collect_vars(*t.guard, vars);
            for (const auto& a : t.actions)
                for (const auto& arg : a.args) collect_vars(*arg, vars);
            for (const Expr* v : vars)
                if (!assignable.count(v->var))
                    diags.push_back({Severity::Error, "undeclared-variable",
                                     "variable '" + v->var + "' is never provided or assigned",
                                     v->line, v->col});
        }
    }
    return diags;
}

}  // namespace jade
