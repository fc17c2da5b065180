#include "rtlforge/vlog/interp.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace rtlforge::vlog {

namespace {

struct ElabError {
    std::uint32_t line;
    std::string message;
};

struct Variable {
    std::string name;
    bool is_reg = false;
    bool is_signed = false;
    std::int64_t msb = 0, lsb = 0;
    std::uint32_t width = 1;
    bool is_array = false;
    std::int64_t arr_lo = 0, arr_hi = -1;
    std::vector<Value> slots;

    std::int64_t arr_count() const { return is_array ? arr_hi - arr_lo + 1 : 1; }
    // storage offset of a declared bit index
    std::int64_t bit_offset(std::int64_t declared) const {
        return msb >= lsb ? declared - lsb : lsb - declared;
    }
};

struct Scope;

struct Process;
struct AssignActivation;

struct Scope {
    std::string path;
    const Module* mod = nullptr;
    Scope* parent = nullptr;
    std::map<std::string, std::unique_ptr<Variable>> vars;
    std::map<std::string, Value> params;
    std::map<std::string, const FunctionDecl*> functions;
    std::map<std::string, const TaskDecl*> tasks;
    std::map<std::string, std::unique_ptr<Scope>> children;

    Variable* find_var(const std::string& name) {
        for (Scope* s = this; s; s = s->parent) {
            auto it = s->vars.find(name);
            if (it != s->vars.end()) return it->second.get();
        }
        return nullptr;
    }
    const Value* find_param(const std::string& name) {
        for (Scope* s = this; s; s = s->parent) {
            auto it = s->params.find(name);
            if (it != s->params.end()) return &it->second;
        }
        return nullptr;
    }
    const FunctionDecl* find_function(const std::string& name) {
        for (Scope* s = this; s; s = s->parent) {
            auto it = s->functions.find(name);
            if (it != s->functions.end()) return it->second;
        }
        return nullptr;
    }
    const TaskDecl* find_task(const std::string& name) {
        for (Scope* s = this; s; s = s->parent) {
            auto it = s->tasks.find(name);
            if (it != s->tasks.end()) return it->second;
        }
        return nullptr;
    }
};

struct Frame {
    const Stmt* stmt = nullptr;
    Scope* scope = nullptr;
    int phase = 0;
    std::size_t idx = 0;
    std::uint64_t count = 0;
    Value tmp;
};

struct Process {
    enum class Kind { Initial, Always };
    Kind kind = Kind::Initial;
    Scope* scope = nullptr;
    const Stmt* root = nullptr;
    std::vector<Frame> frames;
    bool done = false;
    bool queued = false;
    std::uint64_t wait_gen = 0;  // bumps on every wake; stale watchers check it
    std::string name;
};

struct AssignActivation {
    Scope* lhs_scope = nullptr;
    ExprPtr lhs;
    Scope* rhs_scope = nullptr;
    ExprPtr rhs;
    bool queued = false;
};

struct ProcWatcher {
    Process* proc = nullptr;
    SensTerm::Edge edge = SensTerm::Edge::Any;
    std::int64_t bit = -1;  // -1: variable LSB
    std::uint64_t gen = 0;
};

struct VarWatchers {
    std::vector<AssignActivation*> assigns;
    std::vector<ProcWatcher> procs;
    bool monitored = false;
};

struct NbaWrite {
    Variable* var = nullptr;
    std::int64_t slot = 0;
    std::int64_t lo = 0;
    Value value;
};

struct TimeSlot {
    std::vector<Process*> procs;
    std::vector<NbaWrite> nba;
};

struct LvalueSegment {
    Variable* var = nullptr;
    std::int64_t slot = 0;
    std::int64_t lo = 0;
    std::uint32_t width = 0;
    bool valid = false;
};

bool is_posedge(Value::Bit oldb, Value::Bit newb) {
    if (oldb == newb) return false;
    if (oldb == Value::Bit::Zero) return true;                   // 0 -> 1/x/z
    return newb == Value::Bit::One;                              // x/z -> 1
}

bool is_negedge(Value::Bit oldb, Value::Bit newb) {
    if (oldb == newb) return false;
    if (oldb == Value::Bit::One) return true;                    // 1 -> 0/x/z
    return newb == Value::Bit::Zero;                             // x/z -> 0
}

class Sim {
public:
    Sim(const std::vector<Module>& modules, const SimOptions& options)
        : options_(options), out_(options.output ? *options.output : std::cout) {
        for (const auto& m : modules) lib_[m.name] = &m;
    }

    SimResult run(bool elaborate_only_mode) {
        SimResult result;
        std::string top = options_.top.empty() ? detect_top() : options_.top;
        if (top.empty() || !lib_.count(top)) {
            diag(0, top.empty() ? "no top module found" : "top module '" + top + "' not found");
            result.diags = diags_;
            return result;
        }
        try {
            root_ = std::make_unique<Scope>();
            root_->path = top;
            elaborate_module(*root_, *lib_[top], {}, nullptr, 0);
        } catch (const ElabError& e) {
            diag(e.line, e.message);
            result.diags = diags_;
            return result;
        }
        result.elaborated = true;
        if (elaborate_only_mode) {
            result.diags = diags_;
            return result;
        }

        // time 0: settle continuous assigns, then start procedural blocks
        for (auto& a : assigns_) queue_assign(a.get());
        for (auto& p : processes_) queue_proc(p.get());

        while (!finish_) {
            drain_delta();
            flush_monitors();
            if (finish_ || aborted_) break;
            if (future_.empty()) break;
            auto it = future_.begin();
            now_ = it->first;
            if (options_.max_time && now_ > options_.max_time) {
                aborted_ = true;
                diag(0, "simulation exceeded max time");
                break;
            }
            TimeSlot slot = std::move(it->second);
            future_.erase(it);
            for (Process* p : slot.procs) queue_proc(p);
            for (auto& w : slot.nba) nba_now_.push_back(std::move(w));
        }

        result.finished = finish_;
        result.aborted = aborted_;
        result.end_time = now_;
        result.diags = diags_;
        return result;
    }

private:
    const SimOptions& options_;
    std::ostream& out_;
    std::map<std::string, const Module*> lib_;
    std::unique_ptr<Scope> root_;
    std::vector<std::unique_ptr<Process>> processes_;
    std::vector<std::unique_ptr<AssignActivation>> assigns_;
    std::map<Variable*, VarWatchers> watchers_;
    std::deque<Process*> active_procs_;
    std::deque<AssignActivation*> active_assigns_;
    std::vector<NbaWrite> nba_now_;
    std::map<std::uint64_t, TimeSlot> future_;
    std::vector<Diagnostic> diags_;
    std::set<std::string> warned_;
    std::uint64_t now_ = 0;
    std::uint64_t steps_ = 0;
    bool finish_ = false;
    bool aborted_ = false;
    std::uint32_t rng_state_ = 0x2545f491;

    struct Monitor {
        Scope* scope;
        std::vector<ExprPtr> args;
        bool dirty = false;
    };
    std::vector<std::unique_ptr<Monitor>> monitors_;

    void diag(std::uint32_t line, std::string msg) {
        diags_.push_back(Diagnostic{root_ ? root_->path : "", line, std::move(msg)});
    }
    void warn_once(const std::string& key, std::uint32_t line, const std::string& msg) {
        if (warned_.insert(key).second) diag(line, "warning: " + msg);
    }

    [[noreturn]] void elab_fail(std::uint32_t line, std::string msg) const {
        throw ElabError{line, std::move(msg)};
    }

    std::string detect_top() const {
        std::set<std::string> instantiated;
        for (const auto& [name, mod] : lib_) {
            for (const auto& item : mod->items) {
                if (const auto* inst = std::get_if<ModuleInst>(&item)) {
                    instantiated.insert(inst->module_name);
                }
            }
        }
        std::vector<std::string> tops;
        for (const auto& [name, mod] : lib_) {
            if (!instantiated.count(name)) tops.push_back(name);
        }
        if (tops.empty()) return {};
        if (tops.size() == 1) return tops[0];
        // prefer a testbench-looking name
        for (const auto& t : tops) {
            auto low = t;
            for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (low.find("tb") != std::string::npos || low.find("test") != std::string::npos)
                return t;
        }
        return tops[0];
    }

    // ---- elaboration ----

    std::int64_t const_int(Scope& scope, const ExprPtr& e, const char* what) {
        Value v = eval(scope, e, 0);
        if (v.has_unknown()) elab_fail(e ? e->line : 0, std::string(what) + " is not constant");
        return v.as_signed(true).to_int64();
    }

    Variable* declare_var(Scope& scope, const std::string& name, bool is_reg, bool is_signed,
                          const std::optional<Range>& range, const std::optional<Range>& array,
                          std::uint32_t /*line*/, std::uint32_t fixed_width = 0) {
        auto it = scope.vars.find(name);
        if (it != scope.vars.end()) {
            // port + net redeclaration merge: wider info wins
            Variable* v = it->second.get();
            if (range) {
                std::int64_t msb = const_int(scope, range->msb, "range bound");
                std::int64_t lsb = const_int(scope, range->lsb, "range bound");
                v->msb = msb;
                v->lsb = lsb;
                v->width = static_cast<std::uint32_t>(std::llabs(msb - lsb)) + 1;
            }
            if (fixed_width) {
                v->msb = fixed_width - 1;
                v->lsb = 0;
                v->width = fixed_width;
            }
            v->is_reg = v->is_reg || is_reg;
            v->is_signed = v->is_signed || is_signed;
            v->slots.assign(static_cast<std::size_t>(v->arr_count()),
                            Value::all_x(v->width).as_signed(v->is_signed));
            return v;
        }
        auto var = std::make_unique<Variable>();
        var->name = name;
        var->is_reg = is_reg;
        var->is_signed = is_signed;
        if (fixed_width) {
            var->msb = fixed_width - 1;
            var->lsb = 0;
            var->width = fixed_width;
        } else if (range) {
            var->msb = const_int(scope, range->msb, "range bound");
            var->lsb = const_int(scope, range->lsb, "range bound");
            var->width = static_cast<std::uint32_t>(std::llabs(var->msb - var->lsb)) + 1;
        }
        if (array) {
            std::int64_t a = const_int(scope, array->msb, "array bound");
            std::int64_t b = const_int(scope, array->lsb, "array bound");
            var->is_array = true;
            var->arr_lo = std::min(a, b);
            var->arr_hi = std::max(a, b);
        }
        var->slots.assign(static_cast<std::size_t>(var->arr_count()),
                          Value::all_x(var->width).as_signed(var->is_signed));
        Variable* raw = var.get();
        scope.vars[name] = std::move(var);
        return raw;
    }

    void elaborate_module(Scope& scope, const Module& mod,
                          const std::vector<std::pair<std::string, ExprPtr>>& param_overrides,
                          Scope* inst_parent, int depth) {
        if (depth > 64) elab_fail(mod.line, "instantiation too deep (recursive modules?)");
        scope.mod = &mod;

        // parameters first (with overrides), then everything else
        std::vector<std::string> param_order;
        for (const auto& item : mod.items) {
            if (const auto* p = std::get_if<ParamDecl>(&item)) {
                for (const auto& [name, expr] : p->items) {
                    Value v = eval(scope, expr, 0);
                    if (p->range) {
                        std::int64_t msb = const_int(scope, p->range->msb, "range bound");
                        std::int64_t lsb = const_int(scope, p->range->lsb, "range bound");
                        v = v.resized(static_cast<std::uint32_t>(std::llabs(msb - lsb)) + 1)
                                .as_signed(p->is_signed);
                    }
                    scope.params[name] = v;
                    if (!p->local) param_order.push_back(name);
                }
            }
        }
        // apply overrides (evaluated in the instantiating scope)
        std::size_t ordinal = 0;
        for (const auto& [pname, pexpr] : param_overrides) {
            if (!pexpr) {
                ++ordinal;
                continue;
            }
            std::string target = pname;
            if (target.empty()) {
                if (ordinal >= param_order.size())
                    elab_fail(pexpr->line, "too many parameter overrides for " + mod.name);
                target = param_order[ordinal++];
            }
            if (!scope.params.count(target))
                elab_fail(pexpr->line, "unknown parameter '" + target + "' in " + mod.name);
            scope.params[target] = eval(*inst_parent, pexpr, 0);
        }
        // re-fold local params that may depend on overridden ones
        for (const auto& item : mod.items) {
            if (const auto* p = std::get_if<ParamDecl>(&item)) {
                for (const auto& [name, expr] : p->items) {
                    bool overridden = false;
                    for (const auto& [oname, oexpr] : param_overrides) {
                        if (oname == name && oexpr) overridden = true;
                    }
                    std::size_t ord = 0;
                    for (const auto& [oname, oexpr] : param_overrides) {
                        if (oname.empty() && oexpr && ord < param_order.size() &&
                            param_order[ord] == name)
                            overridden = true;
                        if (oname.empty()) ++ord;
                    }
                    if (!overridden) scope.params[name] = eval(scope, expr, 0);
                }
            }
        }

        // declarations
        for (const auto& item : mod.items) {
            if (const auto* port = std::get_if<PortDecl>(&item)) {
                for (const auto& name : port->names) {
                    declare_var(scope, name, port->is_reg, port->is_signed, port->range,
                                std::nullopt, port->line);
                }
            } else if (const auto* net = std::get_if<NetDecl>(&item)) {
                for (const auto& it2 : net->items) {
                    bool is_reg = net->net != NetDecl::Net::Wire;
                    std::uint32_t fixed = 0;
                    bool is_signed = net->is_signed;
                    if (net->net == NetDecl::Net::Integer) fixed = 32;
                    if (net->net == NetDecl::Net::Time) fixed = 64;
                    if (net->net == NetDecl::Net::Genvar)
                        elab_fail(net->line, "genvar requires generate support");
                    Variable* var = declare_var(scope, it2.name, is_reg, is_signed, net->range,
                                                it2.array, net->line, fixed);
                    if (net->net == NetDecl::Net::Supply0)
                        var->slots.assign(1, Value::zeros(var->width));
                    if (net->net == NetDecl::Net::Supply1)
                        var->slots.assign(1, bit_not(Value::zeros(var->width)));
                }
            } else if (const auto* fn = std::get_if<FunctionDecl>(&item)) {
                scope.functions[fn->name] = fn;
            } else if (const auto* task = std::get_if<TaskDecl>(&item)) {
                scope.tasks[task->name] = task;
            }
        }

        // function/task static scopes
        for (const auto& [name, fn] : scope.functions) elaborate_function_scope(scope, *fn);
        for (const auto& [name, task] : scope.tasks) elaborate_task_scope(scope, *task);

        // behavior
        for (const auto& item : mod.items) {
            if (const auto* net = std::get_if<NetDecl>(&item)) {
                for (const auto& it2 : net->items) {
                    if (!it2.init) continue;
                    auto lhs = std::make_shared<Expr>();
                    lhs->kind = Expr::Kind::Ident;
                    lhs->text = it2.name;
                    lhs->line = net->line;
                    if (net->net == NetDecl::Net::Wire) {
                        add_assign(scope, lhs, scope, it2.init);
                    } else {
                        auto st = std::make_shared<Stmt>();
                        st->kind = Stmt::Kind::Assign;
                        st->line = net->line;
                        st->lhs = lhs;
                        st->rhs = it2.init;
                        add_process(Process::Kind::Initial, scope, keep_stmt(st));
                    }
                }
            } else if (const auto* ca = std::get_if<ContAssign>(&item)) {
                add_assign(scope, ca->lhs, scope, ca->rhs);
            } else if (const auto* proc = std::get_if<ProcBlock>(&item)) {
                add_process(proc->is_initial ? Process::Kind::Initial : Process::Kind::Always,
                            scope, proc->body.get());
            } else if (const auto* gate = std::get_if<GateInst>(&item)) {
                elaborate_gate(scope, *gate);
            } else if (const auto* inst = std::get_if<ModuleInst>(&item)) {
                elaborate_instances(scope, *inst, depth);
            }
        }
    }

    // statements synthesized during elaboration need stable storage
    std::vector<StmtPtr> synthesized_stmts_;
    std::vector<ExprPtr> synthesized_exprs_;
    const Stmt* keep_stmt(StmtPtr s) {
        synthesized_stmts_.push_back(std::move(s));
        return synthesized_stmts_.back().get();
    }
    ExprPtr keep_expr(ExprPtr e) {
        synthesized_exprs_.push_back(std::move(e));
        return synthesized_exprs_.back();
    }

    void elaborate_function_scope(Scope& scope, const FunctionDecl& fn) {
        auto child = std::make_unique<Scope>();
        child->path = scope.path + "." + fn.name;
        child->parent = &scope;
        Scope* raw = child.get();
        scope.children["fn " + fn.name] = std::move(child);
        std::uint32_t ret_width = fn.is_integer ? 32 : 1;
        if (fn.range) {
            std::int64_t msb = const_int(scope, fn.range->msb, "range bound");
            std::int64_t lsb = const_int(scope, fn.range->lsb, "range bound");
            ret_width = static_cast<std::uint32_t>(std::llabs(msb - lsb)) + 1;
        }
        declare_var(*raw, fn.name, true, fn.is_signed, fn.range, std::nullopt, fn.line,
                    fn.range ? 0 : ret_width);
        for (const auto& arg : fn.args) {
            for (const auto& name : arg.names)
                declare_var(*raw, name, true, arg.is_signed, arg.range, std::nullopt, fn.line);
        }
        for (const auto& local : fn.locals) {
            for (const auto& it2 : local.items) {
                std::uint32_t fixed = local.net == NetDecl::Net::Integer ? 32
                                    : local.net == NetDecl::Net::Time    ? 64
                                                                         : 0;
                declare_var(*raw, it2.name, true,
                            local.is_signed || local.net == NetDecl::Net::Integer, local.range,
                            it2.array, local.line, fixed);
            }
        }
    }

    void elaborate_task_scope(Scope& scope, const TaskDecl& task) {
        auto child = std::make_unique<Scope>();
        child->path = scope.path + "." + task.name;
        child->parent = &scope;
        Scope* raw = child.get();
        scope.children["task " + task.name] = std::move(child);
        for (const auto& arg : task.args) {
            for (const auto& name : arg.names)
                declare_var(*raw, name, true, arg.is_signed, arg.range, std::nullopt, task.line);
        }
        for (const auto& local : task.locals) {
            for (const auto& it2 : local.items) {
                std::uint32_t fixed = local.net == NetDecl::Net::Integer ? 32
                                    : local.net == NetDecl::Net::Time    ? 64
                                                                         : 0;
                declare_var(*raw, it2.name, true,
                            local.is_signed || local.net == NetDecl::Net::Integer, local.range,
                            it2.array, local.line, fixed);
            }
        }
    }

    Scope* function_scope(Scope& scope, const std::string& name) {
        for (Scope* s = &scope; s; s = s->parent) {
            auto it = s->children.find("fn " + name);
            if (it != s->children.end()) return it->second.get();
        }
        return nullptr;
    }
    Scope* task_scope(Scope& scope, const std::string& name) {
        for (Scope* s = &scope; s; s = s->parent) {
            auto it = s->children.find("task " + name);
            if (it != s->children.end()) return it->second.get();
        }
        return nullptr;
    }

    void add_process(Process::Kind kind, Scope& scope, const Stmt* root) {
        auto p = std::make_unique<Process>();
        p->kind = kind;
        p->scope = &scope;
        p->root = root;
        p->name = scope.path;
        Frame f;
        f.stmt = root;
        f.scope = &scope;
        p->frames.push_back(std::move(f));
        processes_.push_back(std::move(p));
    }

    void add_assign(Scope& lhs_scope, const ExprPtr& lhs, Scope& rhs_scope, const ExprPtr& rhs) {
        auto a = std::make_unique<AssignActivation>();
        a->lhs_scope = &lhs_scope;
        a->lhs = lhs;
        a->rhs_scope = &rhs_scope;
        a->rhs = rhs;
        AssignActivation* raw = a.get();
        assigns_.push_back(std::move(a));
        // sensitivity: every variable read on the RHS plus index vars on the LHS
        std::vector<Variable*> reads;
        collect_reads(rhs_scope, rhs, reads);
        if (lhs) {
            if (lhs->kind == Expr::Kind::Select) {
                if (lhs->b) collect_reads(lhs_scope, lhs->b, reads);
                if (lhs->c) collect_reads(lhs_scope, lhs->c, reads);
            }
        }
        std::sort(reads.begin(), reads.end());
        reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
        for (Variable* v : reads) watchers_[v].assigns.push_back(raw);
    }

    void elaborate_gate(Scope& scope, const GateInst& gate) {
        if (gate.conns.size() < 2) elab_fail(gate.line, "gate needs at least 2 connections");
        auto mk_binary = [&](const std::string& op, ExprPtr a, ExprPtr b) {
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Binary;
            e->line = gate.line;
            e->text = op;
            e->a = std::move(a);
            e->b = std::move(b);
            return e;
        };
        auto mk_unary = [&](const std::string& op, ExprPtr a) {
            auto e = std::make_shared<Expr>();
            e->kind = Expr::Kind::Unary;
            e->line = gate.line;
            e->text = op;
            e->a = std::move(a);
            return e;
        };
        if (gate.gate == "not" || gate.gate == "buf") {
            // outputs are all but the last connection
            ExprPtr input = gate.conns.back();
            for (std::size_t i = 0; i + 1 < gate.conns.size(); ++i) {
                ExprPtr rhs = gate.gate == "not" ? keep_expr(mk_unary("~", input)) : input;
                add_assign(scope, gate.conns[i], scope, rhs);
            }
            return;
        }
        std::string op;
        bool invert = false;
        if (gate.gate == "and") op = "&";
        else if (gate.gate == "or") op = "|";
        else if (gate.gate == "xor") op = "^";
        else if (gate.gate == "nand") { op = "&"; invert = true; }
        else if (gate.gate == "nor") { op = "|"; invert = true; }
        else if (gate.gate == "xnor") { op = "^"; invert = true; }
        else elab_fail(gate.line, "unsupported gate primitive '" + gate.gate + "'");
        ExprPtr acc = gate.conns[1];
        for (std::size_t i = 2; i < gate.conns.size(); ++i)
            acc = mk_binary(op, acc, gate.conns[i]);
        if (invert) acc = mk_unary("~", acc);
        add_assign(scope, gate.conns[0], scope, keep_expr(acc));
    }

    void elaborate_instances(Scope& scope, const ModuleInst& inst, int depth) {
        auto lib_it = lib_.find(inst.module_name);
        if (lib_it == lib_.end())
            elab_fail(inst.line, "unknown module '" + inst.module_name + "'");
        const Module& child_mod = *lib_it->second;

        for (const auto& one : inst.insts) {
            auto child = std::make_unique<Scope>();
            child->path = scope.path + "." + one.inst_name;
            child->parent = &scope;
            Scope* raw = child.get();
            scope.children[one.inst_name] = std::move(child);
            elaborate_module(*raw, child_mod, inst.params, &scope, depth + 1);

            // port binding
            std::map<std::string, ExprPtr> bound;
            bool named = !one.conns.empty() && !one.conns.front().first.empty();
            if (named) {
                for (const auto& [pname, actual] : one.conns) {
                    if (pname.empty())
                        elab_fail(inst.line, "mixed named and ordered connections");
                    bound[pname] = actual;
                }
            } else {
                if (one.conns.size() > child_mod.header_ports.size())
                    elab_fail(inst.line, "too many port connections for " + inst.module_name);
                for (std::size_t i = 0; i < one.conns.size(); ++i)
                    bound[child_mod.header_ports[i]] = one.conns[i].second;
            }
            // port directions from the child module's decls
            std::map<std::string, PortDecl::Dir> dirs;
            for (const auto& item : child_mod.items) {
                if (const auto* port = std::get_if<PortDecl>(&item)) {
                    for (const auto& n : port->names) dirs[n] = port->dir;
                }
            }
            for (const auto& pname : child_mod.header_ports) {
                auto bit = bound.find(pname);
                if (bit == bound.end() || !bit->second) continue;  // unconnected
                auto dir_it = dirs.find(pname);
                if (dir_it == dirs.end())
                    elab_fail(inst.line, "port '" + pname + "' has no direction in " +
                                             inst.module_name);
                auto formal = std::make_shared<Expr>();
                formal->kind = Expr::Kind::Ident;
                formal->text = pname;
                formal->line = inst.line;
                if (dir_it->second == PortDecl::Dir::Input) {
                    add_assign(*raw, keep_expr(formal), scope, bit->second);
                } else if (dir_it->second == PortDecl::Dir::Output) {
                    add_assign(scope, bit->second, *raw, keep_expr(formal));
                } else {
                    elab_fail(inst.line, "inout ports are not supported");
                }
            }
            for (const auto& [pname, actual] : bound) {
                if (std::find(child_mod.header_ports.begin(), child_mod.header_ports.end(),
                              pname) == child_mod.header_ports.end())
                    elab_fail(inst.line,
                              "no port '" + pname + "' on module " + inst.module_name);
            }
        }
    }

    void collect_reads(Scope& scope, const ExprPtr& e, std::vector<Variable*>& out) {
        if (!e) return;
        switch (e->kind) {
            case Expr::Kind::Ident: {
                if (Variable* v = resolve_var(scope, e->text)) out.push_back(v);
                break;
            }
            case Expr::Kind::Call:
                for (const auto& arg : e->items) collect_reads(scope, arg, out);
                break;
            default:
                collect_reads(scope, e->a, out);
                collect_reads(scope, e->b, out);
                collect_reads(scope, e->c, out);
                for (const auto& x : e->items) collect_reads(scope, x, out);
        }
    }

    void collect_stmt_reads(Scope& scope, const Stmt* s, std::vector<Variable*>& out) {
        if (!s) return;
        collect_reads(scope, s->cond, out);
        collect_reads(scope, s->subject, out);
        collect_reads(scope, s->rhs, out);
        if (s->lhs && s->lhs->kind == Expr::Kind::Select) {
            collect_reads(scope, s->lhs->b, out);
            collect_reads(scope, s->lhs->c, out);
        }
        for (const auto& a : s->args) collect_reads(scope, a, out);
        for (const auto& item : s->items) {
            for (const auto& l : item.labels) collect_reads(scope, l, out);
            collect_stmt_reads(scope, item.body.get(), out);
        }
        collect_stmt_reads(scope, s->then_branch.get(), out);
        collect_stmt_reads(scope, s->else_branch.get(), out);
        collect_stmt_reads(scope, s->init.get(), out);
        collect_stmt_reads(scope, s->step.get(), out);
        collect_stmt_reads(scope, s->body.get(), out);
        for (const auto& sub : s->stmts) collect_stmt_reads(scope, sub.get(), out);
    }

    Variable* resolve_var(Scope& scope, const std::string& name) {
        if (name.find('.') == std::string::npos) return scope.find_var(name);
        // hierarchical: walk child scopes from the current module downward
        auto parts_path = name;
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            auto dot = parts_path.find('.', start);
            if (dot == std::string::npos) {
                parts.push_back(parts_path.substr(start));
                break;
            }
            parts.push_back(parts_path.substr(start, dot - start));
            start = dot + 1;
        }
        for (Scope* s = &scope; s; s = s->parent) {
            Scope* cur = s;
            bool ok = true;
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
                auto it = cur->children.find(parts[i]);
                if (it == cur->children.end()) {
                    ok = false;
                    break;
                }
                cur = it->second.get();
            }
            if (!ok) continue;
            auto it = cur->vars.find(parts.back());
            if (it != cur->vars.end()) return it->second.get();
        }
        return nullptr;
    }

    // ---- expression evaluation ----

    bool signed_of(Scope& scope, const ExprPtr& e) {
        if (!e) return false;
        switch (e->kind) {
            case Expr::Kind::Literal: return e->literal.is_signed();
            case Expr::Kind::StringLit: return false;
            case Expr::Kind::Ident: {
                if (Variable* v = resolve_var(scope, e->text)) return v->is_signed;
                if (const Value* p = scope.find_param(e->text)) return p->is_signed();
                return false;
            }
            case Expr::Kind::Unary:
                if (e->text == "~" || e->text == "-" || e->text == "+")
                    return signed_of(scope, e->a);
                return false;
            case Expr::Kind::Binary: {
                const std::string& op = e->text;
                if (op == "+" || op == "-" || op == "*" || op == "/" || op == "%")
                    return signed_of(scope, e->a) && signed_of(scope, e->b);
                if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>" || op == "**")
                    return signed_of(scope, e->a);
                return false;
            }
            case Expr::Kind::Ternary:
                return signed_of(scope, e->b) && signed_of(scope, e->c);
            case Expr::Kind::Call:
                if (e->text == "$signed") return true;
                if (e->text == "$unsigned" || e->text == "$time" || e->text == "$random")
                    return e->text == "$random";
                if (const FunctionDecl* fn = scope.find_function(e->text))
                    return fn->is_signed;
                return false;
            default:
                return false;
        }
    }

    std::uint32_t width_of(Scope& scope, const ExprPtr& e) {
        if (!e) return 1;
        switch (e->kind) {
            case Expr::Kind::Literal: return e->literal.width();
            case Expr::Kind::StringLit:
                return std::max<std::uint32_t>(8, static_cast<std::uint32_t>(e->text.size()) * 8);
            case Expr::Kind::Ident: {
                if (!e->text.empty() && e->text[0] == '$') {
                    if (e->text == "$time" || e->text == "$realtime") return 64;
                    return 32;
                }
                if (Variable* v = resolve_var(scope, e->text)) return v->width;
                if (const Value* p = scope.find_param(e->text)) return p->width();
                return 1;
            }
            case Expr::Kind::Unary: {
                const std::string& op = e->text;
                if (op == "~" || op == "-" || op == "+") return width_of(scope, e->a);
                return 1;
            }
            case Expr::Kind::Binary: {
                const std::string& op = e->text;
                if (op == "+" || op == "-" || op == "*" || op == "/" || op == "%" || op == "&" ||
                    op == "|" || op == "^" || op == "^~" || op == "~^")
                    return std::max(width_of(scope, e->a), width_of(scope, e->b));
                if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>" || op == "**")
                    return width_of(scope, e->a);
                return 1;
            }
            case Expr::Kind::Ternary:
                return std::max(width_of(scope, e->b), width_of(scope, e->c));
            case Expr::Kind::Concat: {
                std::uint32_t total = 0;
                for (const auto& item : e->items) total += width_of(scope, item);
                return std::max<std::uint32_t>(total, 1);
            }
            case Expr::Kind::Repl: {
                Value count = eval(scope, e->a, 0);
                std::uint32_t n =
                    count.has_unknown() ? 0 : static_cast<std::uint32_t>(count.to_uint64());
                std::uint32_t total = 0;
                for (const auto& item : e->items) total += width_of(scope, item);
                return std::max<std::uint32_t>(n * total, 1);
            }
            case Expr::Kind::Select: {
                if (e->select_mode == 0) {
                    if (e->a->kind == Expr::Kind::Ident) {
                        Variable* v = resolve_var(scope, e->a->text);
                        if (v && v->is_array) return v->width;
                    }
                    return 1;
                }
                if (e->select_mode == ':') {
                    Value msb = eval(scope, e->b, 0), lsb = eval(scope, e->c, 0);
                    if (msb.has_unknown() || lsb.has_unknown()) return 1;
                    return static_cast<std::uint32_t>(
                               std::llabs(msb.as_signed(true).to_int64() -
                                          lsb.as_signed(true).to_int64())) +
                           1;
                }
                Value cnt = eval(scope, e->c, 0);
                return cnt.has_unknown() ? 1
                                         : std::max<std::uint32_t>(
                                               1, static_cast<std::uint32_t>(cnt.to_uint64()));
            }
            case Expr::Kind::Call: {
                if (e->text == "$time" || e->text == "$realtime") return 64;
                if (e->text == "$stime" || e->text == "$random" || e->text == "$clog2") return 32;
                if (e->text == "$signed" || e->text == "$unsigned")
                    return e->items.empty() ? 1 : width_of(scope, e->items[0]);
                if (const FunctionDecl* fn = scope.find_function(e->text)) {
                    if (fn->is_integer) return 32;
                    if (!fn->range) return 1;
                    Scope* fs = function_scope(scope, e->text);
                    if (fs) {
                        if (Variable* rv = fs->vars.count(fn->name) ? fs->vars[fn->name].get()
                                                                    : nullptr)
                            return rv->width;
                    }
                    return 1;
                }
                return 32;
            }
        }
        return 1;
    }

    Value eval(Scope& scope, const ExprPtr& e, std::uint32_t ctx) {
        if (!e) return Value::all_x(1);
        switch (e->kind) {
            case Expr::Kind::Literal: {
                Value v = e->literal;
                if (ctx > v.width()) v = v.resized(ctx);
                return v;
            }
            case Expr::Kind::StringLit: {
                Value v = Value::from_chars(e->text);
                if (ctx > v.width()) v = v.resized(ctx);
                return v;
            }
            case Expr::Kind::Ident: {
                if (!e->text.empty() && e->text[0] == '$') {
                    Expr call;
                    call.kind = Expr::Kind::Call;
                    call.text = e->text;
                    call.line = e->line;
                    auto holder = std::make_shared<Expr>(std::move(call));
                    return eval_call(scope, holder, ctx);
                }
                if (Variable* var = resolve_var(scope, e->text)) {
                    if (var->is_array) {
                        warn_once("arrayread:" + e->text, e->line,
                                  "array '" + e->text + "' read without an index");
                        return Value::all_x(var->width);
                    }
                    Value v = var->slots[0].as_signed(var->is_signed);
                    if (ctx > v.width()) v = v.resized(ctx);
                    return v;
                }
                if (const Value* p = scope.find_param(e->text)) {
                    Value v = *p;
                    if (ctx > v.width()) v = v.resized(ctx);
                    return v;
                }
                warn_once("unknownid:" + e->text, e->line,
                          "reference to unknown identifier '" + e->text + "'");
                return Value::all_x(1);
            }
            case Expr::Kind::Unary: return eval_unary(scope, e, ctx);
            case Expr::Kind::Binary: return eval_binary(scope, e, ctx);
            case Expr::Kind::Ternary: {
                Value cond = eval(scope, e->a, 0);
                std::uint32_t w = std::max(ctx, width_of(scope, e));
                if (cond.truth() == Value::Truth::Unknown) {
                    Value tv = eval(scope, e->b, w).resized(w);
                    Value fv = eval(scope, e->c, w).resized(w);
                    Value merged(w);
                    for (std::uint32_t i = 0; i < w; ++i) {
                        merged.set_bit(i, tv.bit(i) == fv.bit(i) ? tv.bit(i) : Value::Bit::X);
                    }
                    return merged;
                }
                return eval(scope, cond.truth() == Value::Truth::True ? e->b : e->c, w);
            }
            case Expr::Kind::Concat: {
                std::vector<Value> parts;
                parts.reserve(e->items.size());
                for (const auto& item : e->items) parts.push_back(eval(scope, item, 0));
                Value v = Value::concat(parts);
                if (ctx > v.width()) v = v.resized(ctx);
                return v;
            }
            case Expr::Kind::Repl: {
                Value count = eval(scope, e->a, 0);
                if (count.has_unknown()) return Value::all_x(std::max(ctx, 1u));
                std::uint64_t n = count.to_uint64();
                std::vector<Value> inner;
                for (const auto& item : e->items) inner.push_back(eval(scope, item, 0));
                Value once = Value::concat(inner);
                std::vector<Value> reps(static_cast<std::size_t>(n), once);
                Value v = n == 0 ? Value::zeros(1) : Value::concat(reps);
                if (ctx > v.width()) v = v.resized(ctx);
                return v;
            }
            case Expr::Kind::Select: return eval_select(scope, e, ctx);
            case Expr::Kind::Call: return eval_call(scope, e, ctx);
        }
        return Value::all_x(1);
    }

    Value eval_unary(Scope& scope, const ExprPtr& e, std::uint32_t ctx) {
        const std::string& op = e->text;
        if (op == "!") {
            Value v = eval(scope, e->a, 0);
            switch (v.truth()) {
                case Value::Truth::True: return Value::from_truth(Value::Truth::False);
                case Value::Truth::False: return Value::from_truth(Value::Truth::True);
                default: return Value::from_truth(Value::Truth::Unknown);
            }
        }
        if (op == "&") return eval(scope, e->a, 0).reduce_and();
        if (op == "|") return eval(scope, e->a, 0).reduce_or();
        if (op == "^") return eval(scope, e->a, 0).reduce_xor();
        if (op == "~&") return bit_not(eval(scope, e->a, 0).reduce_and());
        if (op == "~|") return bit_not(eval(scope, e->a, 0).reduce_or());
        if (op == "~^" || op == "^~") return bit_not(eval(scope, e->a, 0).reduce_xor());
        std::uint32_t w = std::max(ctx, width_of(scope, e->a));
        Value v = eval(scope, e->a, w);
        if (op == "~") return bit_not(v).as_signed(v.is_signed());
        if (op == "-") return arith_neg(v);
        return v;  // unary +
    }

    Value eval_binary(Scope& scope, const ExprPtr& e, std::uint32_t ctx) {
        const std::string& op = e->text;
        if (op == "&&" || op == "||") {
            Value a = eval(scope, e->a, 0);
            Value b = eval(scope, e->b, 0);
            auto ta = a.truth(), tb = b.truth();
            if (op == "&&") {
                if (ta == Value::Truth::False || tb == Value::Truth::False)
                    return Value::from_truth(Value::Truth::False);
                if (ta == Value::Truth::True && tb == Value::Truth::True)
                    return Value::from_truth(Value::Truth::True);
                return Value::from_truth(Value::Truth::Unknown);
            }
            if (ta == Value::Truth::True || tb == Value::Truth::True)
                return Value::from_truth(Value::Truth::True);
            if (ta == Value::Truth::False && tb == Value::Truth::False)
                return Value::from_truth(Value::Truth::False);
            return Value::from_truth(Value::Truth::Unknown);
        }
        if (op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" ||
            op == ">" || op == ">=") {
            bool s = signed_of(scope, e->a) && signed_of(scope, e->b);
            Value a = eval(scope, e->a, 0).as_signed(s && signed_of(scope, e->a));
            Value b = eval(scope, e->b, 0).as_signed(s && signed_of(scope, e->b));
            a = a.as_signed(s);
            b = b.as_signed(s);
            if (op == "==") return logic_eq(a, b);
            if (op == "!=") return logic_neq(a, b);
            if (op == "===")
                return Value::from_truth(case_eq(a, b) ? Value::Truth::True
                                                       : Value::Truth::False);
            if (op == "!==")
                return Value::from_truth(case_eq(a, b) ? Value::Truth::False
                                                       : Value::Truth::True);
            if (op == "<") return logic_lt(a, b);
            if (op == "<=") return logic_le(a, b);
            if (op == ">") return logic_gt(a, b);
            return logic_ge(a, b);
        }
        if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") {
            std::uint32_t w = std::max(ctx, width_of(scope, e->a));
            Value a = eval(scope, e->a, w);
            Value amount = eval(scope, e->b, 0);
            if (op == "<<" || op == "<<<") return shift_left(a, amount);
            if (op == ">>>") return shift_right_arith(a, amount);
            return shift_right_logical(a, amount);
        }
        std::uint32_t w = std::max({ctx, width_of(scope, e->a), width_of(scope, e->b)});
        bool s = signed_of(scope, e->a) && signed_of(scope, e->b);
        Value a = eval(scope, e->a, w).as_signed(s);
        Value b = eval(scope, e->b, w).as_signed(s);
        if (op == "+") return arith_add(a, b).resized(w).as_signed(s);
        if (op == "-") return arith_sub(a, b).resized(w).as_signed(s);
        if (op == "*") return arith_mul(a, b).resized(w).as_signed(s);
        if (op == "/") return arith_div(a, b).resized(w).as_signed(s);
        if (op == "%") return arith_mod(a, b).resized(w).as_signed(s);
        if (op == "**") return arith_pow(a, b);
        if (op == "&") return bit_and(a, b);
        if (op == "|") return bit_or(a, b);
        if (op == "^") return bit_xor(a, b);
        if (op == "^~" || op == "~^") return bit_xnor(a, b);
        warn_once("op:" + op, e->line, "unsupported operator '" + op + "'");
        return Value::all_x(w);
    }

    struct RefInfo {
        Variable* var = nullptr;
        std::int64_t slot = 0;      // array element
        bool whole_array = false;
        bool valid = false;
    };

    RefInfo resolve_base(Scope& scope, const ExprPtr& e, std::int64_t* pending_index,
                         bool* index_unknown) {
        // resolves Ident or Select(Ident-array, idx)
        RefInfo info;
        if (e->kind == Expr::Kind::Ident) {
            info.var = resolve_var(scope, e->text);
            info.whole_array = info.var && info.var->is_array;
            info.valid = info.var != nullptr;
            return info;
        }
        if (e->kind == Expr::Kind::Select && e->select_mode == 0 &&
            e->a->kind == Expr::Kind::Ident) {
            Variable* var = resolve_var(scope, e->a->text);
            if (var && var->is_array) {
                Value idx = eval(scope, e->b, 0);
                if (idx.has_unknown()) {
                    *index_unknown = true;
                    info.var = var;
                    info.valid = false;
                    return info;
                }
                std::int64_t slot = idx.as_signed(true).to_int64() - var->arr_lo;
                info.var = var;
                info.slot = slot;
                info.valid = slot >= 0 && slot < var->arr_count();
                return info;
            }
        }
        (void)pending_index;
        return info;
    }

    Value eval_select(Scope& scope, const ExprPtr& e, std::uint32_t ctx) {
        (void)ctx;
        // array element or bit/part select
        std::int64_t pending = 0;
        bool idx_unknown = false;
        if (e->select_mode == 0) {
            RefInfo base = resolve_base(scope, e, &pending, &idx_unknown);
            if (base.var && base.var->is_array) {
                if (!base.valid) return Value::all_x(base.var->width);
                return base.var->slots[static_cast<std::size_t>(base.slot)].as_signed(false);
            }
        }
        // bit/part select over a vector (possibly an array element)
        Value subject;
        Variable* var = nullptr;
        std::int64_t slot = 0;
        if (e->a->kind == Expr::Kind::Ident) {
            var = resolve_var(scope, e->a->text);
            if (var && !var->is_array) subject = var->slots[0];
        }
        if (e->a->kind == Expr::Kind::Select) {
            bool iu = false;
            RefInfo base = resolve_base(scope, e->a, &pending, &iu);
            if (base.var && base.var->is_array) {
                var = base.var;
                if (!base.valid) return Value::all_x(var->width);
                slot = base.slot;
                subject = var->slots[static_cast<std::size_t>(slot)];
            }
        }
        if (!var) {
            if (e->a->kind == Expr::Kind::Ident) {
                if (const Value* p = scope.find_param(e->a->text)) {
                    subject = *p;
                    // parameters select like [w-1:0] vectors
                    var = nullptr;
                } else {
                    return Value::all_x(1);
                }
            } else {
                subject = eval(scope, e->a, 0);
            }
        }
        std::int64_t d_msb = var ? var->msb : static_cast<std::int64_t>(subject.width()) - 1;
        std::int64_t d_lsb = var ? var->lsb : 0;
        auto offset = [&](std::int64_t declared) {
            return d_msb >= d_lsb ? declared - d_lsb : d_lsb - declared;
        };
        if (e->select_mode == 0) {
            Value idx = eval(scope, e->b, 0);
            if (idx.has_unknown()) return Value::all_x(1);
            return subject.select(offset(idx.as_signed(true).to_int64()), 1);
        }
        if (e->select_mode == ':') {
            Value m = eval(scope, e->b, 0), l = eval(scope, e->c, 0);
            if (m.has_unknown() || l.has_unknown()) return Value::all_x(1);
            std::int64_t hi = m.as_signed(true).to_int64();
            std::int64_t lo = l.as_signed(true).to_int64();
            std::int64_t off_a = offset(hi), off_b = offset(lo);
            std::int64_t start = std::min(off_a, off_b);
            std::uint32_t w = static_cast<std::uint32_t>(std::llabs(off_a - off_b)) + 1;
            return subject.select(start, w);
        }
        // indexed part select
        Value base_v = eval(scope, e->b, 0);
        Value cnt_v = eval(scope, e->c, 0);
        if (base_v.has_unknown() || cnt_v.has_unknown()) return Value::all_x(1);
        std::int64_t base_idx = base_v.as_signed(true).to_int64();
        std::int64_t w = static_cast<std::int64_t>(cnt_v.to_uint64());
        if (w <= 0) return Value::all_x(1);
        std::int64_t other = e->select_mode == '+' ? base_idx + w - 1 : base_idx - w + 1;
        std::int64_t off_a = offset(base_idx), off_b = offset(other);
        std::int64_t start = std::min(off_a, off_b);
        return subject.select(start, static_cast<std::uint32_t>(w));
    }

    Value eval_call(Scope& scope, const ExprPtr& e, std::uint32_t ctx) {
        const std::string& name = e->text;
        if (!name.empty() && name[0] == '$') {
            if (name == "$time" || name == "$realtime") return Value::from_uint(now_, 64);
            if (name == "$stime") return Value::from_uint(now_ & 0xffffffffull, 32);
            if (name == "$random") {
                rng_state_ ^= rng_state_ << 13;
                rng_state_ ^= rng_state_ >> 17;
                rng_state_ ^= rng_state_ << 5;
                return Value::from_uint(rng_state_, 32).as_signed(true);
            }
            if (name == "$signed" && !e->items.empty())
                return eval(scope, e->items[0], ctx).as_signed(true);
            if (name == "$unsigned" && !e->items.empty())
                return eval(scope, e->items[0], ctx).as_signed(false);
            if (name == "$clog2" && !e->items.empty()) {
                Value v = eval(scope, e->items[0], 0);
                if (v.has_unknown()) return Value::all_x(32);
                std::uint64_t x = v.to_uint64();
                std::uint32_t r = 0;
                while ((1ull << r) < x) ++r;
                return Value::from_uint(r, 32);
            }
            warn_once("sysfn:" + name, e->line, "unknown system function '" + name + "'");
            return Value::all_x(32);
        }
        const FunctionDecl* fn = scope.find_function(name);
        if (!fn) {
            warn_once("fn:" + name, e->line, "call to unknown function '" + name + "'");
            return Value::all_x(1);
        }
        return exec_function(scope, *fn, e);
    }

    // functions run to completion; blocking statements inside are an error
    Value exec_function(Scope& scope, const FunctionDecl& fn, const ExprPtr& call) {
        Scope* fs = function_scope(scope, fn.name);
        if (!fs) return Value::all_x(1);
        std::size_t arg_i = 0;
        for (const auto& arg : fn.args) {
            for (const auto& aname : arg.names) {
                Variable* av = fs->vars[aname].get();
                Value v = arg_i < call->items.size()
                              ? eval(scope, call->items[arg_i], av->width)
                              : Value::all_x(av->width);
                av->slots[0] = v.resized(av->width).as_signed(av->is_signed);
                ++arg_i;
            }
        }
        if (fn_depth_ > 32) {
            warn_once("fnrec:" + fn.name, fn.line, "function recursion too deep");
            return Value::all_x(1);
        }
        ++fn_depth_;
        exec_sync(*fs, fn.body.get());
        --fn_depth_;
        Variable* ret = fs->vars[fn.name].get();
        return ret->slots[0].as_signed(ret->is_signed);
    }

    int fn_depth_ = 0;

    void exec_sync(Scope& scope, const Stmt* s) {
        if (!s || finish_) return;
        bump_steps(s->line);
        switch (s->kind) {
            case Stmt::Kind::Block:
                for (const auto& sub : s->stmts) exec_sync(scope, sub.get());
                return;
            case Stmt::Kind::If: {
                Value c = eval(scope, s->cond, 0);
                if (c.truth() == Value::Truth::True) exec_sync(scope, s->then_branch.get());
                else exec_sync(scope, s->else_branch.get());
                return;
            }
            case Stmt::Kind::Case: {
                const Stmt* body = match_case(scope, *s);
                exec_sync(scope, body);
                return;
            }
            case Stmt::Kind::For: {
                exec_sync(scope, s->init.get());
                std::uint64_t guard = 0;
                while (eval(scope, s->cond, 0).truth() == Value::Truth::True) {
                    exec_sync(scope, s->body.get());
                    exec_sync(scope, s->step.get());
                    if (++guard > 10'000'000) {
                        warn_once("forloop", s->line, "runaway for loop in function");
                        break;
                    }
                }
                return;
            }
            case Stmt::Kind::While: {
                std::uint64_t guard = 0;
                while (eval(scope, s->cond, 0).truth() == Value::Truth::True) {
                    exec_sync(scope, s->body.get());
                    if (++guard > 10'000'000) {
                        warn_once("whileloop", s->line, "runaway while loop in function");
                        break;
                    }
                }
                return;
            }
            case Stmt::Kind::Repeat: {
                Value n = eval(scope, s->cond, 0);
                std::uint64_t count = n.has_unknown() ? 0 : n.to_uint64();
                for (std::uint64_t i = 0; i < count; ++i) exec_sync(scope, s->body.get());
                return;
            }
            case Stmt::Kind::Assign: {
                std::uint32_t w = lvalue_width(scope, s->lhs);
                Value v = eval(scope, s->rhs, w);
                write_lvalue(scope, s->lhs, v);
                return;
            }
            case Stmt::Kind::SysTask:
                exec_systask(scope, *s);
                return;
            case Stmt::Kind::Null:
                return;
            default:
                warn_once("fnstmt", s->line, "blocking statement inside a function ignored");
                return;
        }
    }

    const Stmt* match_case(Scope& scope, const Stmt& s) {
        Value subject = eval(scope, s.subject, 0);
        const Stmt* default_body = nullptr;
        for (const auto& item : s.items) {
            if (item.is_default) {
                default_body = item.body.get();
                continue;
            }
            for (const auto& label : item.labels) {
                Value lv = eval(scope, label, 0);
                bool hit = false;
                if (s.case_variant == 0) hit = case_eq(subject, lv);
                else if (s.case_variant == 1) hit = casez_match(subject, lv);
                else hit = casex_match(subject, lv);
                if (hit) return item.body.get();
            }
        }
        return default_body;
    }

    // ---- lvalues ----

    std::uint32_t lvalue_width(Scope& scope, const ExprPtr& lhs) {
        if (!lhs) return 1;
        if (lhs->kind == Expr::Kind::Concat) {
            std::uint32_t total = 0;
            for (const auto& item : lhs->items) total += lvalue_width(scope, item);
            return std::max<std::uint32_t>(total, 1);
        }
        return width_of(scope, lhs);
    }

    void resolve_lvalue(Scope& scope, const ExprPtr& lhs,
                        std::vector<LvalueSegment>& segments) {
        if (!lhs) return;
        if (lhs->kind == Expr::Kind::Concat) {
            for (const auto& item : lhs->items) resolve_lvalue(scope, item, segments);
            return;
        }
        LvalueSegment seg;
        if (lhs->kind == Expr::Kind::Ident) {
            Variable* var = resolve_var(scope, lhs->text);
            if (!var) {
                warn_once("lv:" + lhs->text, lhs->line,
                          "assignment to unknown identifier '" + lhs->text + "'");
                segments.push_back(seg);
                return;
            }
            if (var->is_array) {
                warn_once("lvarr:" + lhs->text, lhs->line,
                          "assignment to whole array '" + lhs->text + "'");
                segments.push_back(seg);
                return;
            }
            seg.var = var;
            seg.lo = 0;
            seg.width = var->width;
            seg.valid = true;
            segments.push_back(seg);
            return;
        }
        if (lhs->kind != Expr::Kind::Select) {
            warn_once("lvkind", lhs->line, "unsupported lvalue form");
            segments.push_back(seg);
            return;
        }

        // Select: array element, bit, or part select
        std::int64_t pending = 0;
        bool idx_unknown = false;
        if (lhs->select_mode == 0) {
            RefInfo base = resolve_base(scope, lhs, &pending, &idx_unknown);
            if (base.var && base.var->is_array) {
                seg.var = base.var;
                seg.slot = base.slot;
                seg.lo = 0;
                seg.width = base.var->width;
                seg.valid = base.valid;
                segments.push_back(seg);
                return;
            }
        }
        Variable* var = nullptr;
        std::int64_t slot = 0;
        if (lhs->a->kind == Expr::Kind::Ident) {
            var = resolve_var(scope, lhs->a->text);
            if (var && var->is_array) {
                warn_once("lvarr2:" + lhs->a->text, lhs->line,
                          "bit select on unindexed array '" + lhs->a->text + "'");
                segments.push_back(seg);
                return;
            }
        } else if (lhs->a->kind == Expr::Kind::Select) {
            bool iu = false;
            RefInfo base = resolve_base(scope, lhs->a, &pending, &iu);
            if (base.var && base.var->is_array) {
                var = base.var;
                slot = base.slot;
                if (!base.valid) {
                    seg.var = var;
                    seg.valid = false;
                    segments.push_back(seg);
                    return;
                }
            }
        }
        if (!var) {
            warn_once("lvsel", lhs->line, "unsupported lvalue select");
            segments.push_back(seg);
            return;
        }
        auto offset = [&](std::int64_t declared) { return var->bit_offset(declared); };
        seg.var = var;
        seg.slot = slot;
        if (lhs->select_mode == 0) {
            Value idx = eval(scope, lhs->b, 0);
            if (idx.has_unknown()) {
                seg.valid = false;
                segments.push_back(seg);
                return;
            }
            seg.lo = offset(idx.as_signed(true).to_int64());
            seg.width = 1;
            seg.valid = seg.lo >= 0 && seg.lo < var->width;
            segments.push_back(seg);
            return;
        }
        if (lhs->select_mode == ':') {
            Value m = eval(scope, lhs->b, 0), l = eval(scope, lhs->c, 0);
            if (m.has_unknown() || l.has_unknown()) {
                seg.valid = false;
                segments.push_back(seg);
                return;
            }
            std::int64_t off_a = offset(m.as_signed(true).to_int64());
            std::int64_t off_b = offset(l.as_signed(true).to_int64());
            seg.lo = std::min(off_a, off_b);
            seg.width = static_cast<std::uint32_t>(std::llabs(off_a - off_b)) + 1;
            seg.valid = true;
            segments.push_back(seg);
            return;
        }
        Value base_v = eval(scope, lhs->b, 0);
        Value cnt_v = eval(scope, lhs->c, 0);
        if (base_v.has_unknown() || cnt_v.has_unknown()) {
            seg.valid = false;
            segments.push_back(seg);
            return;
        }
        std::int64_t base_idx = base_v.as_signed(true).to_int64();
        std::int64_t w = static_cast<std::int64_t>(cnt_v.to_uint64());
        std::int64_t other = lhs->select_mode == '+' ? base_idx + w - 1 : base_idx - w + 1;
        std::int64_t off_a = offset(base_idx), off_b = offset(other);
        seg.lo = std::min(off_a, off_b);
        seg.width = static_cast<std::uint32_t>(w);
        seg.valid = w > 0;
        segments.push_back(seg);
    }

    void write_lvalue(Scope& scope, const ExprPtr& lhs, const Value& value) {
        std::vector<LvalueSegment> segments;
        resolve_lvalue(scope, lhs, segments);
        std::uint32_t total = 0;
        for (const auto& seg : segments) total += seg.valid ? seg.width : 0;
        Value sized = value.resized(std::max(total, 1u));
        // concat lvalues assign MSB-first
        std::uint32_t pos = total;
        for (const auto& seg : segments) {
            if (!seg.valid || !seg.var) continue;
            pos -= seg.width;
            Value piece = sized.select(pos, seg.width);
            commit_write(seg.var, seg.slot, seg.lo, piece);
        }
    }

    void schedule_nba(Scope& scope, const ExprPtr& lhs, const Value& value,
                      std::uint64_t delay) {
        std::vector<LvalueSegment> segments;
        resolve_lvalue(scope, lhs, segments);
        std::uint32_t total = 0;
        for (const auto& seg : segments) total += seg.valid ? seg.width : 0;
        Value sized = value.resized(std::max(total, 1u));
        std::uint32_t pos = total;
        for (const auto& seg : segments) {
            if (!seg.valid || !seg.var) continue;
            pos -= seg.width;
            NbaWrite w;
            w.var = seg.var;
            w.slot = seg.slot;
            w.lo = seg.lo;
            w.value = sized.select(pos, seg.width);
            if (delay == 0) nba_now_.push_back(std::move(w));
            else future_[now_ + delay].nba.push_back(std::move(w));
        }
    }

    void commit_write(Variable* var, std::int64_t slot, std::int64_t lo, const Value& piece) {
        if (slot < 0 || slot >= var->arr_count()) return;
        Value& stored = var->slots[static_cast<std::size_t>(slot)];
        Value old = stored;
        stored.write(lo, piece);
        if (stored.identical(old)) return;
        notify(var, old, stored);
    }

    void notify(Variable* var, const Value& oldv, const Value& newv) {
        auto it = watchers_.find(var);
        if (it == watchers_.end()) return;
        VarWatchers& w = it->second;
        for (AssignActivation* a : w.assigns) queue_assign(a);
        if (w.monitored) {
            for (auto& m : monitors_) m->dirty = true;
        }
        std::size_t stale = 0;
        for (auto& pw : w.procs) {
            if (!pw.proc || pw.gen != pw.proc->wait_gen) {
                ++stale;
                continue;
            }
            bool wake = false;
            if (pw.edge == SensTerm::Edge::Any) {
                wake = true;
            } else {
                std::uint32_t b = pw.bit >= 0 ? static_cast<std::uint32_t>(pw.bit) : 0;
                auto ob = oldv.bit(b), nb = newv.bit(b);
                wake = pw.edge == SensTerm::Edge::Pos ? is_posedge(ob, nb) : is_negedge(ob, nb);
            }
            if (wake) {
                pw.proc->wait_gen++;  // invalidates sibling watchers
                queue_proc(pw.proc);
                ++stale;
            }
        }
        if (stale > 32 && stale * 2 > w.procs.size()) {
            std::vector<ProcWatcher> keep;
            keep.reserve(w.procs.size() - stale);
            for (auto& pw : w.procs) {
                if (pw.proc && pw.gen == pw.proc->wait_gen) keep.push_back(pw);
            }
            w.procs.swap(keep);
        }
    }

    void queue_proc(Process* p) {
        if (p->done || p->queued) return;
        p->queued = true;
        active_procs_.push_back(p);
    }
    void queue_assign(AssignActivation* a) {
        if (a->queued) return;
        a->queued = true;
        active_assigns_.push_back(a);
    }

    // ---- scheduler ----

    void drain_delta() {
        while (true) {
            while ((!active_assigns_.empty() || !active_procs_.empty()) && !finish_ &&
                   !aborted_) {
                // continuous assigns settle before procedural resumption
                if (!active_assigns_.empty()) {
                    AssignActivation* a = active_assigns_.front();
                    active_assigns_.pop_front();
                    a->queued = false;
                    run_assign(a);
                    continue;
                }
                Process* p = active_procs_.front();
                active_procs_.pop_front();
                p->queued = false;
                resume(p);
            }
            if (finish_ || aborted_) return;
            if (!nba_now_.empty()) {
                std::vector<NbaWrite> batch;
                batch.swap(nba_now_);
                for (auto& w : batch) commit_write(w.var, w.slot, w.lo, w.value);
                continue;
            }
            return;
        }
    }

    void run_assign(AssignActivation* a) {
        bump_steps(a->rhs ? a->rhs->line : 0);
        std::uint32_t w = lvalue_width(*a->lhs_scope, a->lhs);
        Value v = eval(*a->rhs_scope, a->rhs, w);
        write_lvalue(*a->lhs_scope, a->lhs, v);
    }

    void bump_steps(std::uint32_t line) {
        if (++steps_ > options_.max_steps && !aborted_) {
            aborted_ = true;
            diag(line, "simulation exceeded max steps (possible zero-delay loop)");
        }
    }

    void push_frame(Process* p, const Stmt* stmt, Scope* scope) {
        Frame f;
        f.stmt = stmt;
        f.scope = scope;
        p->frames.push_back(std::move(f));
    }

    enum class StepResult { Continue, Blocked };

    void resume(Process* p) {
        while (!finish_ && !aborted_) {
            if (p->frames.empty()) {
                if (p->kind == Process::Kind::Always) {
                    push_frame(p, p->root, p->scope);
                } else {
                    p->done = true;
                    return;
                }
            }
            if (step(p) == StepResult::Blocked) return;
        }
    }

    StepResult step(Process* p) {
        Frame& f = p->frames.back();
        const Stmt* s = f.stmt;
        Scope& scope = *f.scope;
        bump_steps(s->line);
        if (aborted_) return StepResult::Blocked;
        static const bool trace = std::getenv("RTLSIM_TRACE") != nullptr;
        if (trace) {
            std::cerr << "[t=" << now_ << "] " << p->name << " stmt=" << static_cast<int>(s->kind)
                      << " line=" << s->line << " phase=" << f.phase << " frames="
                      << p->frames.size() << "\n";
        }

        switch (s->kind) {
            case Stmt::Kind::Null:
                p->frames.pop_back();
                return StepResult::Continue;

            case Stmt::Kind::Block: {
                if (f.idx < s->stmts.size()) {
                    const Stmt* child = s->stmts[f.idx].get();
                    ++f.idx;
                    push_frame(p, child, &scope);
                } else {
                    p->frames.pop_back();
                }
                return StepResult::Continue;
            }

            case Stmt::Kind::If: {
                Value c = eval(scope, s->cond, 0);
                const Stmt* branch = c.truth() == Value::Truth::True ? s->then_branch.get()
                                                                     : s->else_branch.get();
                p->frames.pop_back();
                if (branch) push_frame(p, branch, &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::Case: {
                const Stmt* body = match_case(scope, *s);
                p->frames.pop_back();
                if (body) push_frame(p, body, &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::For: {
                if (f.phase == 0) {
                    f.phase = 1;
                    push_frame(p, s->init.get(), &scope);
                    return StepResult::Continue;
                }
                if (f.phase == 1) {
                    Value c = eval(scope, s->cond, 0);
                    if (c.truth() != Value::Truth::True) {
                        p->frames.pop_back();
                        return StepResult::Continue;
                    }
                    f.phase = 2;
                    if (s->body) push_frame(p, s->body.get(), &scope);
                    return StepResult::Continue;
                }
                f.phase = 1;
                push_frame(p, s->step.get(), &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::While: {
                Value c = eval(scope, s->cond, 0);
                if (c.truth() != Value::Truth::True) {
                    p->frames.pop_back();
                    return StepResult::Continue;
                }
                if (s->body) push_frame(p, s->body.get(), &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::Repeat: {
                if (f.phase == 0) {
                    Value n = eval(scope, s->cond, 0);
                    f.count = n.has_unknown() ? 0 : n.to_uint64();
                    f.phase = 1;
                }
                if (f.count == 0) {
                    p->frames.pop_back();
                    return StepResult::Continue;
                }
                --f.count;
                if (s->body) push_frame(p, s->body.get(), &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::Forever: {
                if (s->body) push_frame(p, s->body.get(), &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::Delay: {
                if (f.phase == 0) {
                    Value d = eval(scope, s->delay, 0);
                    std::uint64_t delay = d.has_unknown() ? 0 : d.to_uint64();
                    f.phase = 1;
                    future_[now_ + delay].procs.push_back(p);
                    return StepResult::Blocked;
                }
                p->frames.pop_back();
                if (s->body) push_frame(p, s->body.get(), &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::Event: {
                if (f.phase == 0) {
                    f.phase = 1;
                    register_event_waits(p, scope, *s);
                    return StepResult::Blocked;
                }
                p->frames.pop_back();
                if (s->body) push_frame(p, s->body.get(), &scope);
                return StepResult::Continue;
            }

            case Stmt::Kind::Wait: {
                Value c = eval(scope, s->cond, 0);
                if (c.truth() == Value::Truth::True) {
                    p->frames.pop_back();
                    if (s->body) push_frame(p, s->body.get(), &scope);
                    return StepResult::Continue;
                }
                std::vector<Variable*> reads;
                collect_reads(scope, s->cond, reads);
                if (reads.empty()) {
                    warn_once("wait", s->line, "wait() condition reads no signals; parking");
                    p->frames.pop_back();
                    return StepResult::Continue;
                }
                for (Variable* v : reads) {
                    watchers_[v].procs.push_back(
                        ProcWatcher{p, SensTerm::Edge::Any, -1, p->wait_gen});
                }
                return StepResult::Blocked;
            }

            case Stmt::Kind::Assign: {
                if (s->delay) {
                    if (f.phase == 0) {
                        std::uint32_t w = lvalue_width(scope, s->lhs);
                        f.tmp = eval(scope, s->rhs, w);
                        Value d = eval(scope, s->delay, 0);
                        f.phase = 1;
                        future_[now_ + (d.has_unknown() ? 0 : d.to_uint64())].procs.push_back(p);
                        return StepResult::Blocked;
                    }
                    write_lvalue(scope, s->lhs, f.tmp);
                    p->frames.pop_back();
                    return StepResult::Continue;
                }
                std::uint32_t w = lvalue_width(scope, s->lhs);
                Value v = eval(scope, s->rhs, w);
                write_lvalue(scope, s->lhs, v);
                p->frames.pop_back();
                return StepResult::Continue;
            }

            case Stmt::Kind::NbAssign: {
                std::uint32_t w = lvalue_width(scope, s->lhs);
                Value v = eval(scope, s->rhs, w);
                std::uint64_t delay = 0;
                if (s->delay) {
                    Value d = eval(scope, s->delay, 0);
                    delay = d.has_unknown() ? 0 : d.to_uint64();
                }
                schedule_nba(scope, s->lhs, v, delay);
                p->frames.pop_back();
                return StepResult::Continue;
            }

            case Stmt::Kind::SysTask: {
                exec_systask(scope, *s);
                p->frames.pop_back();
                return StepResult::Continue;
            }

            case Stmt::Kind::TaskCall: {
                if (f.phase == 0) {
                    const TaskDecl* task = scope.find_task(s->name);
                    if (!task) {
                        warn_once("task:" + s->name, s->line,
                                  "call to unknown task '" + s->name + "'");
                        p->frames.pop_back();
                        return StepResult::Continue;
                    }
                    Scope* ts = task_scope(scope, s->name);
                    // copy-in inputs
                    std::size_t arg_i = 0;
                    for (const auto& arg : task->args) {
                        for (const auto& aname : arg.names) {
                            if (arg.dir != PortDecl::Dir::Output && arg_i < s->args.size()) {
                                Variable* av = ts->vars[aname].get();
                                Value v = eval(scope, s->args[arg_i], av->width);
                                commit_write(av, 0, 0, v.resized(av->width));
                            }
                            ++arg_i;
                        }
                    }
                    f.phase = 1;
                    if (task->body) push_frame(p, task->body.get(), ts);
                    return StepResult::Continue;
                }
                // copy-out outputs
                const TaskDecl* task = scope.find_task(s->name);
                Scope* ts = task_scope(scope, s->name);
                if (task && ts) {
                    std::size_t arg_i = 0;
                    for (const auto& arg : task->args) {
                        for (const auto& aname : arg.names) {
                            if (arg.dir != PortDecl::Dir::Input && arg_i < s->args.size()) {
                                Variable* av = ts->vars[aname].get();
                                write_lvalue(scope, s->args[arg_i], av->slots[0]);
                            }
                            ++arg_i;
                        }
                    }
                }
                p->frames.pop_back();
                return StepResult::Continue;
            }

            case Stmt::Kind::Disable: {
                // unwind to (and including) the named block
                bool found = false;
                for (std::size_t i = p->frames.size(); i-- > 0;) {
                    const Stmt* fs = p->frames[i].stmt;
                    if (fs->kind == Stmt::Kind::Block && fs->label == s->name) {
                        p->frames.resize(i);
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    warn_once("disable:" + s->name, s->line,
                              "disable target '" + s->name + "' not found");
                    p->frames.pop_back();
                }
                return StepResult::Continue;
            }
        }
        p->frames.pop_back();
        return StepResult::Continue;
    }

    void register_event_waits(Process* p, Scope& scope, const Stmt& s) {
        std::vector<std::pair<Variable*, ProcWatcher>> regs;
        if (s.sens_star) {
            std::vector<Variable*> reads;
            collect_stmt_reads(scope, s.body.get(), reads);
            std::sort(reads.begin(), reads.end());
            reads.erase(std::unique(reads.begin(), reads.end()), reads.end());
            for (Variable* v : reads)
                regs.emplace_back(v, ProcWatcher{p, SensTerm::Edge::Any, -1, p->wait_gen});
        } else {
            for (const auto& term : s.sens) {
                Variable* var = nullptr;
                std::int64_t bit = -1;
                if (term.expr->kind == Expr::Kind::Ident) {
                    var = resolve_var(scope, term.expr->text);
                } else if (term.expr->kind == Expr::Kind::Select &&
                           term.expr->a->kind == Expr::Kind::Ident) {
                    var = resolve_var(scope, term.expr->a->text);
                    if (var && !var->is_array && term.expr->select_mode == 0) {
                        Value idx = eval(scope, term.expr->b, 0);
                        if (!idx.has_unknown())
                            bit = var->bit_offset(idx.as_signed(true).to_int64());
                    }
                }
                if (!var) {
                    std::vector<Variable*> reads;
                    collect_reads(scope, term.expr, reads);
                    for (Variable* v : reads)
                        regs.emplace_back(v, ProcWatcher{p, SensTerm::Edge::Any, -1, p->wait_gen});
                    continue;
                }
                regs.emplace_back(var, ProcWatcher{p, term.edge, bit, p->wait_gen});
            }
        }
        if (regs.empty()) {
            warn_once("emptysens", s.line, "event control with empty sensitivity; parking process");
        }
        for (auto& [var, watcher] : regs) watchers_[var].procs.push_back(watcher);
    }

    // ---- system tasks ----

    void exec_systask(Scope& scope, const Stmt& s) {
        const std::string& name = s.name;
        if (name == "$finish" || name == "$stop") {
            finish_ = true;
            return;
        }
        if (name == "$display" || name == "$write" || name == "$strobe" || name == "$error" ||
            name == "$info" || name == "$warning") {
            out_ << format_args(scope, s.args);
            if (name != "$write") out_ << "\n";
            return;
        }
        if (name == "$monitor") {
            auto m = std::make_unique<Monitor>();
            m->scope = &scope;
            m->args = s.args;
            std::vector<Variable*> reads;
            for (const auto& a : s.args) collect_reads(scope, a, reads);
            for (Variable* v : reads) watchers_[v].monitored = true;
            out_ << format_args(scope, s.args) << "\n";
            monitors_.push_back(std::move(m));
            return;
        }
        if (name == "$readmemh" || name == "$readmemb") {
            exec_readmem(scope, s, name == "$readmemh");
            return;
        }
        if (name == "$dumpfile" || name == "$dumpvars" || name == "$dumpon" ||
            name == "$dumpoff" || name == "$timeformat" || name == "$dumpall" ||
            name == "$printtimescale" || name == "$monitoron" || name == "$monitoroff") {
            return;  // accepted, no effect
        }
        if (name == "$fatal") {
            out_ << format_args(scope, s.args) << "\n";
            finish_ = true;
            return;
        }
        warn_once("systask:" + name, s.line, "unknown system task '" + name + "' ignored");
    }

    void exec_readmem(Scope& scope, const Stmt& s, bool hex) {
        if (s.args.size() < 2 || s.args[0]->kind != Expr::Kind::StringLit ||
            s.args[1]->kind != Expr::Kind::Ident) {
            warn_once("readmem", s.line, "$readmem needs (\"file\", memory)");
            return;
        }
        Variable* var = resolve_var(scope, s.args[1]->text);
        if (!var || !var->is_array) {
            warn_once("readmemvar", s.line, "$readmem target is not a memory");
            return;
        }
        std::ifstream in(s.args[0]->text);
        if (!in) {
            warn_once("readmemfile:" + s.args[0]->text, s.line,
                      "$readmem cannot open '" + s.args[0]->text + "'");
            return;
        }
        std::string tok;
        std::int64_t slot = 0;
        while (in >> tok) {
            if (tok.rfind("//", 0) == 0) {
                std::string line;
                std::getline(in, line);
                continue;
            }
            if (tok[0] == '@') {
                slot = std::strtoll(tok.c_str() + 1, nullptr, 16) - var->arr_lo;
                continue;
            }
            auto parsed = Value::parse_literal(
                (hex ? std::to_string(var->width) + "'h" : std::to_string(var->width) + "'b") +
                tok);
            if (parsed && slot >= 0 && slot < var->arr_count()) {
                commit_write(var, slot, 0, parsed->resized(var->width));
            }
            ++slot;
        }
    }

    std::string format_value(const Value& v, char spec) {
        switch (spec) {
            case 'd': return v.fmt_dec();
            case 'b': return v.fmt_bin();
            case 'h': case 'x': return v.fmt_hex();
            case 'o': return v.fmt_oct();
            case 'c': {
                std::uint64_t c = v.to_uint64() & 0xff;
                return std::string(1, static_cast<char>(c));
            }
            case 's': {
                std::string out;
                for (std::int64_t i = static_cast<std::int64_t>((v.width() + 7) / 8) - 1; i >= 0;
                     --i) {
                    std::uint64_t byte =
                        v.select(i * 8, 8).has_unknown() ? 0 : v.select(i * 8, 8).to_uint64();
                    if (byte) out += static_cast<char>(byte);
                }
                return out;
            }
            case 't': return v.fmt_dec();
            default: return v.fmt_dec();
        }
    }

    std::string format_args(Scope& scope, const std::vector<ExprPtr>& args) {
        if (args.empty()) return {};
        std::string out;
        std::size_t next = 1;
        if (args[0]->kind == Expr::Kind::StringLit) {
            const std::string& fmt = args[0]->text;
            for (std::size_t i = 0; i < fmt.size(); ++i) {
                if (fmt[i] != '%') {
                    out += fmt[i];
                    continue;
                }
                ++i;
                if (i >= fmt.size()) break;
                if (fmt[i] == '%') {
                    out += '%';
                    continue;
                }
                while (i < fmt.size() &&
                       (std::isdigit(static_cast<unsigned char>(fmt[i])) || fmt[i] == '.'))
                    ++i;
                if (i >= fmt.size()) break;
                char spec = static_cast<char>(std::tolower(static_cast<unsigned char>(fmt[i])));
                if (spec == 'm') {
                    out += scope.path;
                    continue;
                }
                if (next < args.size()) {
                    Value v = eval(scope, args[next], 0);
                    if (args[next]->kind == Expr::Kind::StringLit && spec == 's') {
                        out += args[next]->text;
                    } else {
                        out += format_value(v, spec);
                    }
                    ++next;
                }
            }
            // extra args beyond the format string print as decimals
            for (; next < args.size(); ++next) {
                out += format_value(eval(scope, args[next], 0), 'd');
            }
            return out;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += " ";
            if (args[i]->kind == Expr::Kind::StringLit) out += args[i]->text;
            else out += format_value(eval(scope, args[i], 0), 'd');
        }
        return out;
    }

    void flush_monitors() {
        for (auto& m : monitors_) {
            if (m->dirty) {
                m->dirty = false;
                out_ << format_args(*m->scope, m->args) << "\n";
            }
        }
    }
};

}  // namespace

SimResult simulate(const std::vector<Module>& modules, const SimOptions& options) {
    Sim sim(modules, options);
    return sim.run(false);
}

SimResult elaborate_only(const std::vector<Module>& modules, const std::string& top) {
    SimOptions options;
    options.top = top;
    Sim sim(modules, options);
    return sim.run(true);
}

}  // namespace rtlforge::vlog
