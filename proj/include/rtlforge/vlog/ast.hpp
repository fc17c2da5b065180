#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtlforge/vlog/value.hpp"

namespace rtlforge::vlog {

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    enum class Kind {
        Literal,   // literal (4-state)
        StringLit, // text holds the unescaped chars
        Ident,     // text holds the name; may be hierarchical a.b.c
        Unary,     // text = op, a
        Binary,    // text = op, a b
        Ternary,   // a ? b : c
        Concat,    // items
        Repl,      // a = count, items = parts
        Select,    // a = base expr, b / c per select_mode
        Call,      // text = function or system name, items = args
    };
    Kind kind{};
    std::uint32_t line = 0;
    Value literal;
    std::string text;
    ExprPtr a, b, c;
    char select_mode = 0;  // 0: single index (b), ':' range (b=msb,c=lsb), '+'/'-': indexed
    std::vector<ExprPtr> items;
};

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;

struct SensTerm {
    enum class Edge { Any, Pos, Neg } edge = Edge::Any;
    ExprPtr expr;
};

struct CaseItem {
    std::vector<ExprPtr> labels;
    StmtPtr body;
    bool is_default = false;
};

struct Stmt {
    enum class Kind {
        Block, If, Case, For, While, Repeat, Forever,
        Delay, Event, Wait,
        Assign, NbAssign,
        SysTask, TaskCall,
        Disable, Null,
    };
    Kind kind{};
    std::uint32_t line = 0;

    std::vector<StmtPtr> stmts;   // Block
    std::string label;            // Block name

    ExprPtr cond;                 // If / While / Wait / Repeat count
    StmtPtr then_branch, else_branch;

    ExprPtr subject;              // Case
    int case_variant = 0;         // 0 case, 1 casez, 2 casex
    std::vector<CaseItem> items;

    StmtPtr init, step, body;     // For (init/step are Assign stmts); loop/Delay/Event/Wait bodies

    ExprPtr lhs, rhs;             // Assign / NbAssign
    ExprPtr delay;                // Delay amount; intra-assignment delay on Assign/NbAssign

    std::vector<SensTerm> sens;   // Event
    bool sens_star = false;       // @* / @(*)

    std::string name;             // SysTask/TaskCall/Disable
    std::vector<ExprPtr> args;
};

struct Range {
    ExprPtr msb, lsb;
};

struct NetDecl {
    enum class Net { Wire, Reg, Integer, Time, Supply0, Supply1, Genvar };
    Net net = Net::Wire;
    bool is_signed = false;
    std::optional<Range> range;
    struct Item {
        std::string name;
        std::optional<Range> array;  // 1-D unpacked dimension
        ExprPtr init;
    };
    std::vector<Item> items;
    std::uint32_t line = 0;
};

struct PortDecl {
    enum class Dir { Input, Output, Inout };
    Dir dir = Dir::Input;
    bool is_reg = false;
    bool is_signed = false;
    std::optional<Range> range;
    std::vector<std::string> names;
    std::uint32_t line = 0;
};

struct ParamDecl {
    bool local = false;
    bool is_signed = false;
    std::optional<Range> range;
    std::vector<std::pair<std::string, ExprPtr>> items;
    std::uint32_t line = 0;
};

struct ContAssign {
    ExprPtr lhs, rhs;
    ExprPtr delay;
    std::uint32_t line = 0;
};

struct ProcBlock {
    bool is_initial = false;
    StmtPtr body;
    std::uint32_t line = 0;
};

struct GateInst {
    std::string gate;  // and or nand nor xor xnor not buf
    std::string name;
    std::vector<ExprPtr> conns;  // output(s) first, then inputs
    std::uint32_t line = 0;
};

struct ModuleInst {
    std::string module_name;
    std::vector<std::pair<std::string, ExprPtr>> params;  // name empty for ordered
    struct One {
        std::string inst_name;
        std::vector<std::pair<std::string, ExprPtr>> conns;  // name empty for ordered
    };
    std::vector<One> insts;
    std::uint32_t line = 0;
};

struct FunctionDecl {
    std::string name;
    bool is_signed = false;
    bool is_integer = false;
    std::optional<Range> range;
    std::vector<PortDecl> args;
    std::vector<NetDecl> locals;
    StmtPtr body;
    std::uint32_t line = 0;
};

struct TaskDecl {
    std::string name;
    std::vector<PortDecl> args;
    std::vector<NetDecl> locals;
    StmtPtr body;
    std::uint32_t line = 0;
};

using ModuleItem = std::variant<NetDecl, PortDecl, ParamDecl, ContAssign, ProcBlock, GateInst,
                                ModuleInst, FunctionDecl, TaskDecl>;

struct Module {
    std::string name;
    std::vector<std::string> header_ports;  // empty list allowed
    std::vector<ModuleItem> items;
    std::uint32_t line = 0;
};

struct Diagnostic {
    std::string file;
    std::uint32_t line = 0;
    std::string message;
};

}  // namespace rtlforge::vlog
