#pragma once

#include <cstdint>
#include <limits>

#include "sfj/errors.hpp"
#include "sfj/taskc/ast.hpp"

namespace sfj::taskc {

/// 64-bit wrapping arithmetic shared by the IR and reference interpreters.
inline Value eval_binop(BinOp op, Value a, Value b) {
    using U = std::uint64_t;
    switch (op) {
        case BinOp::add: return static_cast<Value>(U(a) + U(b));
        case BinOp::sub: return static_cast<Value>(U(a) - U(b));
        case BinOp::mul: return static_cast<Value>(U(a) * U(b));
        case BinOp::div:
            if (b == 0) throw TaskFault("division by zero");
            if (a == std::numeric_limits<Value>::min() && b == -1) return a;
            return a / b;
        case BinOp::mod:
            if (b == 0) throw TaskFault("modulo by zero");
            if (b == -1) return 0;
            return a % b;
        case BinOp::shl: return static_cast<Value>(U(a) << (U(b) & 63));
        case BinOp::shr: return a >> (U(b) & 63);
        case BinOp::lt: return a < b;
        case BinOp::le: return a <= b;
        case BinOp::gt: return a > b;
        case BinOp::ge: return a >= b;
        case BinOp::eq: return a == b;
        case BinOp::ne: return a != b;
        case BinOp::band: return a & b;
        case BinOp::bor: return a | b;
        case BinOp::bxor: return a ^ b;
        case BinOp::land: return a != 0 && b != 0;
        case BinOp::lor: return a != 0 || b != 0;
    }
    return 0;
}

inline Value eval_unop(UnOp op, Value a) {
    switch (op) {
        case UnOp::neg: return static_cast<Value>(0 - static_cast<std::uint64_t>(a));
        case UnOp::lnot: return a == 0;
        case UnOp::bnot: return ~a;
    }
    return 0;
}

inline Value lcg_next(Value x) {
    return static_cast<Value>(static_cast<std::uint64_t>(x) * 6364136223846793005ULL +
                              1442695040888963407ULL);
}

}  // namespace sfj::taskc
