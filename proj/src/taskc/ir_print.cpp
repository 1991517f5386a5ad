#include <sstream>

#include "sfj/taskc/compiler.hpp"
#include "sfj/taskc/ir.hpp"

namespace sfj::taskc {
namespace {

class Printer {
public:
    Printer(const IrFunction* f, const IrProgram* p, const Cfg* cfg) : f_(f), p_(p), cfg_(cfg) {}

    std::string operand(const Operand& o) const {
        switch (o.kind) {
            case Operand::Kind::none: return "_";
            case Operand::Kind::imm: return std::to_string(o.v);
            case Operand::Kind::reg: return "%" + f_->reg_names[o.v];
            case Operand::Kind::field: return "[" + f_->layout.fields[o.v].name + "]";
            case Operand::Kind::var: return cfg_->vars[o.v].name;
        }
        return "?";
    }

    std::string fn_name(int i) const {
        if (p_) return p_->functions[i].name;
        return "f" + std::to_string(i);
    }
    std::string buf_name(int i) const {
        if (p_) return p_->buffers[i];
        return "buf" + std::to_string(i);
    }

    std::string instr(const Instr& in) const {
        std::ostringstream os;
        auto srcs = [&](std::size_t from) {
            for (std::size_t i = from; i < in.src.size(); ++i) {
                os << (i == from ? "" : ", ") << operand(in.src[i]);
            }
        };
        if (!in.dst.is_none()) os << operand(in.dst) << " = ";
        switch (in.op) {
            case Opcode::mov: os << "mov " << operand(in.src[0]); break;
            case Opcode::unary: os << to_string(in.un) << ' ' << operand(in.src[0]); break;
            case Opcode::binary:
                os << to_string(in.bin) << ' ' << operand(in.src[0]) << ", " << operand(in.src[1]);
                break;
            case Opcode::builtin:
                os << to_string(in.builtin) << '(';
                if (in.buffer >= 0) os << buf_name(in.buffer) << (in.src.empty() ? "" : ", ");
                srcs(0);
                os << ')';
                break;
            case Opcode::call:
                os << "call " << fn_name(in.callee) << '(';
                srcs(0);
                os << ')';
                break;
            case Opcode::spawn:
                os << "spawn " << fn_name(in.callee) << '(';
                srcs(0);
                os << ')';
                if (!in.queue.is_none()) os << " queue(" << operand(in.queue) << ')';
                if (in.ordinal >= 0) os << " ordinal " << in.ordinal;
                if (in.bind_var >= 0 && cfg_) os << " -> " << cfg_->vars[in.bind_var].name;
                break;
            case Opcode::load_result: os << "load_result " << in.ordinal; break;
        }
        return os.str();
    }

    std::string term(const Terminator& t, bool ir) const {
        std::ostringstream os;
        switch (t.kind) {
            case Terminator::Kind::none: os << "exit"; break;
            case Terminator::Kind::jump: os << "jump b" << t.target; break;
            case Terminator::Kind::branch:
                os << "branch " << operand(t.value) << ", b" << t.target << ", b" << t.other;
                break;
            case Terminator::Kind::ret:
                os << (ir ? "finish" : "ret");
                if (!t.value.is_none() && (!ir || f_->returns_value)) os << ' ' << operand(t.value);
                break;
            case Terminator::Kind::taskwait:
                if (ir) {
                    os << "suspend_join " << t.next_state << ", queue "
                       << (t.value.is_none() ? "0" : operand(t.value));
                } else {
                    os << "taskwait";
                    if (!t.value.is_none()) os << " queue(" << operand(t.value) << ')';
                    os << " -> b" << t.target;
                }
                break;
        }
        return os.str();
    }

private:
    const IrFunction* f_;
    const IrProgram* p_;
    const Cfg* cfg_;
};

const char* kind_name(LayoutField::Kind k) {
    switch (k) {
        case LayoutField::Kind::arg: return "arg";
        case LayoutField::Kind::spill: return "spill";
        case LayoutField::Kind::result: return "result";
    }
    return "?";
}

}  // namespace

std::string print_layout(const IrFunction& f) {
    std::ostringstream os;
    os << "layout " << f.name << " (" << f.layout.size_bytes() << " bytes)\n";
    for (const LayoutField& fld : f.layout.fields) {
        os << "  " << fld.offset * 8 << ": " << fld.name << " " << kind_name(fld.kind) << "\n";
    }
    return os.str();
}

std::string print_function(const IrFunction& f, const IrProgram& p) {
    Printer pr(&f, &p, nullptr);
    std::ostringstream os;
    os << (f.is_task ? "task " : "fn ") << f.name << " arity " << f.arity
       << (f.returns_value ? " value" : " void") << " regs " << f.num_regs;
    if (f.is_task) os << " states " << f.num_states();
    os << "\n";
    if (f.is_task) {
        os << "  fields";
        for (const LayoutField& fld : f.layout.fields) os << ' ' << fld.name;
        os << "\n";
        for (int s = 0; s < f.num_states(); ++s) {
            os << "  state " << s << " -> b" << f.state_entry[s] << "\n";
        }
    }
    for (std::size_t b = 0; b < f.blocks.size(); ++b) {
        if (b == 1) continue;  // exit: never executed
        os << "b" << b << ":\n";
        for (const Instr& in : f.blocks[b].code) os << "  " << pr.instr(in) << "\n";
        os << "  " << pr.term(f.blocks[b].term, true) << "\n";
    }
    return os.str();
}

std::string print_program(const IrProgram& p) {
    std::ostringstream os;
    for (const auto& b : p.buffers) os << "buffer " << b << "\n";
    for (std::size_t i = 0; i < p.functions.size(); ++i) {
        if (i > 0 || !p.buffers.empty()) os << "\n";
        os << print_function(p.functions[i], p);
    }
    return os.str();
}

std::string print_cfg(const Cfg& cfg, const LivenessResult* live) {
    Printer pr(nullptr, nullptr, &cfg);
    std::ostringstream os;
    auto set_str = [&](const VarSet& s) {
        std::string out = "{";
        bool first = true;
        for (std::size_t v = s.find_first(); v != VarSet::npos; v = s.find_next(v)) {
            out += (first ? "" : ", ") + cfg.vars[v].name;
            first = false;
        }
        return out + "}";
    };
    for (int b = 0; b < cfg.num_blocks(); ++b) {
        os << "b" << b;
        if (b == Cfg::kEntry) os << " (entry)";
        if (b == Cfg::kExit) os << " (exit)";
        os << ":";
        for (int s : cfg.successors(b)) os << " ->b" << s;
        os << "\n";
        if (live) os << "  live-in " << set_str(live->live_in[b]) << "\n";
        for (const Instr& in : cfg.blocks[b].code) os << "  " << pr.instr(in) << "\n";
        os << "  " << pr.term(cfg.blocks[b].term, false) << "\n";
        if (live) os << "  live-out " << set_str(live->live_out[b]) << "\n";
    }
    return os.str();
}

}  // namespace sfj::taskc
