#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "jade/diagnostics.hpp"
#include "jade/events.hpp"
#include "jade/memory.hpp"

namespace jade {

/// Expression tree for guards and action arguments. Nodes are immutable and
/// shared, so machines copy cheaply (one interpreter instance per agent).
struct Expr {
    enum class Op {
        Num, Var, Payload, PayloadX, PayloadY,
        Add, Sub, Mul, Div, Neg,
        Lt, Le, Gt, Ge, Eq, Ne,
        And, Or, Not,
        Min, Max, Abs,
    };
    Op op = Op::Num;
    double num = 0;
    std::string var;
    std::shared_ptr<const Expr> a, b;
    int line = 0, col = 0;
};

using ExprPtr = std::shared_ptr<const Expr>;

enum class ActionKind { SetWheels, Assign, Emit, Send, Pick, Drop };

/// Unevaluated action as written in the document.
struct ActionDecl {
    ActionKind kind = ActionKind::Pick;
    std::string target;          // assign variable, emit event, send destination
    std::vector<ExprPtr> args;   // set_wheels: 2, assign/send: 1, others: 0
};

/// Trigger name "ANY" is the wildcard: it matches any nonempty event set.
constexpr const char* kAnyTrigger = "ANY";
/// Injected by the runtime every step.
constexpr const char* kTickEvent = "TICK";
/// Every delivered message surfaces as this event.
constexpr const char* kMsgEvent = "MSG";

struct Transition {
    std::string source;
    std::string trigger;
    ExprPtr guard;  // null when unguarded
    std::string target;
    std::vector<ActionDecl> actions;
    int line = 0, col = 0;
};

struct CsmMachine {
    std::string name;
    std::vector<std::string> states;  // declaration order
    std::vector<std::pair<int, int>> state_locs;  // (line, col) per state, for diagnostics
    std::string initial;
    std::vector<Transition> transitions;  // declaration order, all states flattened
    std::string current;                  // runtime state

    void reset() { current = initial; }
};

struct CsmParseResult {
    std::vector<CsmMachine> machines;
    Diagnostics diags;
};

/// Parses the machine document. Diagnostics carry line/column; codes:
/// "parse-error", "duplicate-state", "missing-initial", "unknown-state",
/// "duplicate-machine". Machines are returned only when error-free.
CsmParseResult parse_csm(const std::string& text);

/// Canonical text form; parse(print(m)) reproduces m exactly.
std::string print_csm(const std::vector<CsmMachine>& machines);
std::string print_expr(const Expr& e);

/// Names the rest of the system contributes when validating a machine set:
/// events producible outside the machines and variables readable from memory.
/// TICK and MSG are always producible; emit() targets count automatically.
struct CsmScope {
    std::set<std::string> events;
    std::set<std::string> variables;
};

/// Static checks over parsed machines: "unreachable-state" (no transition
/// path from initial), "unknown-trigger" (no declared producer), and
/// "undeclared-variable" (guard or action reads a name neither assigned by
/// any machine nor provided by the scope).
Diagnostics validate_csm(const std::vector<CsmMachine>& machines, const CsmScope& scope);

/// Expression evaluation failure at run time (wrong type, unset variable,
/// missing payload, division by zero). Aborts the run: validated configs
/// should never reach this.
class CsmError : public std::runtime_error {
public:
    CsmError(const std::string& message, int line, int col)
        : std::runtime_error(message), line(line), col(col) {}
    int line, col;
};

/// Evaluated action, ready for the runtime to execute.
struct ActionCommand {
    ActionKind kind = ActionKind::Pick;
    std::string name;     // assign variable, emit event, send destination
    double x = 0;         // set_wheels vL; assign value; send payload
    double y = 0;         // set_wheels vR
};

struct CsmStepResult {
    std::vector<ActionCommand> actions;  // concatenated in machine order
    EventSet emitted;                    // visible on the NEXT step only
    int fired = 0;                       // transitions taken this step
};

/// One synchronous step of the whole machine set. Selection first: every
/// machine picks its first matching transition against the same pre-step
/// memory. Execution second: the selected transitions' actions run in machine
/// order, and assign() writes are visible to later actions in that sequence.
/// emit() is buffered into `emitted` and never influences this step.
CsmStepResult csm_step(std::vector<CsmMachine>& machines, const EventSet& events, Memory& memory);

/// Guard/argument evaluation, exposed for tests. `payload` may be null.
double eval_number(const Expr& e, const Memory& memory, const EventPayload* payload);
bool eval_condition(const Expr& e, const Memory& memory, const EventPayload* payload);

}  // namespace jade
