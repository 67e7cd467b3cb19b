#include "a4f/lang/resolver.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace a4f {

int ResolvedModel::find_sig(std::string_view name) const {
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    if (sigs[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int ResolvedModel::find_field(std::string_view name) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const ResolvedCommand* ResolvedModel::find_command(std::string_view name) const {
  for (const auto& c : commands) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<int> ResolvedModel::top_level_sigs() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    if (sigs[i].is_top_level()) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool ResolvedModel::is_subsig_of(int sig, int ancestor) const {
  for (int s = sig; s >= 0; s = sigs[s].parent) {
    if (s == ancestor) return true;
  }
  return false;
}

namespace {

std::string quoted(std::string_view name) { return "'" + std::string(name) + "'"; }

class Resolver {
 public:
  explicit Resolver(const SourceModel& src) : src_(src) {}

  ResolvedModel run() {
    collect_declarations();
    build_sigs();
    build_fields();
    for (const auto* p : facts_) {
      out_.facts.push_back({p->name, resolve_closed(*p->body), p->secret, p->span});
    }
    for (const auto& [name, p] : preds_) check_standalone(*p);
    for (const auto& [name, p] : asserts_) check_standalone(*p);
    for (const auto* p : commands_) out_.commands.push_back(resolve_command(*p));
    out_.var_count = next_var_;
    return std::move(out_);
  }

 private:
  struct Binding {
    std::string name;
    ExprPtr value;
  };

  [[noreturn]] static void error(LangErrorCode code, Span span, std::string message) {
    throw LangError(code, span, std::move(message));
  }

  // -- declarations ----------------------------------------------------------

  void declare(const std::string& name, Span span) {
    if (!declared_.insert(name).second) {
      error(LangErrorCode::DuplicateName, span, "duplicate declaration of " + quoted(name));
    }
  }

  void collect_declarations() {
    std::set<std::string> command_names;
    for (const auto& p : src_.paragraphs) {
      switch (p.kind) {
        case ParagraphKind::SigDecl:
          for (const auto& sig : p.sigs) {
            declare(sig.name, sig.span);
            sig_decls_.push_back(&sig);
          }
          break;
        case ParagraphKind::Fact:
          declare(p.name, p.span);
          facts_.push_back(&p);
          break;
        case ParagraphKind::Pred:
          declare(p.name, p.span);
          preds_[p.name] = &p;
          break;
        case ParagraphKind::Assert:
          declare(p.name, p.span);
          asserts_[p.name] = &p;
          break;
        case ParagraphKind::RunCmd:
        case ParagraphKind::CheckCmd:
          if (!command_names.insert(p.command.name).second) {
            error(LangErrorCode::DuplicateName, p.span,
                  "duplicate command " + quoted(p.command.name));
          }
          commands_.push_back(&p);
          break;
      }
    }
    // Fields share the global namespace once sigs are known.
    for (const auto* sig : sig_decls_) {
      for (const auto& f : sig->fields) declare(f.name, f.span);
    }
  }

  void build_sigs() {
    std::vector<const SigDecl*> sorted = sig_decls_;
    std::sort(sorted.begin(), sorted.end(),
              [](const SigDecl* a, const SigDecl* b) { return a->name < b->name; });
    for (const auto* d : sorted) {
      SigInfo info;
      info.name = d->name;
      info.is_abstract = d->is_abstract;
      info.mult = d->mult;
      info.span = d->span;
      out_.sigs.push_back(info);
    }
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      const auto* d = sorted[i];
      if (!d->parent) continue;
      int parent = out_.find_sig(*d->parent);
      if (parent < 0) {
        if (declared_.count(*d->parent)) {
          error(LangErrorCode::TypeMismatch, d->span,
                "only signatures can be extended, " + quoted(*d->parent) + " is not one");
        }
        error(LangErrorCode::UnknownName, d->span, "unknown signature " + quoted(*d->parent));
      }
      out_.sigs[i].parent = parent;
    }
    for (std::size_t i = 0; i < out_.sigs.size(); ++i) {
      int s = static_cast<int>(i);
      std::size_t steps = 0;
      while (out_.sigs[s].parent >= 0) {
        s = out_.sigs[s].parent;
        if (++steps > out_.sigs.size()) {
          error(LangErrorCode::CyclicExtends, out_.sigs[i].span,
                "cyclic extension involving " + quoted(out_.sigs[i].name));
        }
      }
      out_.sigs[i].top = s;
      if (out_.sigs[i].parent >= 0) {
        out_.sigs[out_.sigs[i].parent].children.push_back(static_cast<int>(i));
      }
    }
  }

  void build_fields() {
    struct Pending {
      const FieldDecl* decl;
      int owner;
    };
    std::vector<Pending> pending;
    for (const auto* d : sig_decls_) {
      for (const auto& f : d->fields) pending.push_back({&f, out_.find_sig(d->name)});
    }
    std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
      return a.decl->name < b.decl->name;
    });
    for (const auto& [decl, owner] : pending) {
      FieldInfo info;
      info.name = decl->name;
      info.owner = owner;
      info.span = decl->span;
      info.columns.push_back(owner);
      for (const auto& col : decl->columns) {
        int sig = out_.find_sig(col);
        if (sig < 0) {
          error(declared_.count(col) ? LangErrorCode::TypeMismatch : LangErrorCode::UnknownName,
                decl->span, "field column " + quoted(col) + " is not a signature");
        }
        info.columns.push_back(sig);
      }
      info.range_mult = decl->range_mult;
      if (decl->arrow_mult) {
        info.left_mult = decl->arrow_mult->first;
        info.right_mult = decl->arrow_mult->second;
      }
      out_.fields.push_back(info);
    }
  }

  // -- formulas --------------------------------------------------------------

  FormulaPtr resolve_closed(const Formula& f) {
    env_.clear();
    return resolve(f);
  }

  void check_standalone(const Paragraph& p) {
    env_.clear();
    call_stack_ = {p.name};
    bind_params(p, nullptr);
    resolve(*p.body);
    call_stack_.clear();
    env_.clear();
  }

  /// Binds each parameter to a fresh variable; collects quantifier decls for
  /// them when `decls` is non-null.
  void bind_params(const Paragraph& p, std::vector<QuantDecl>* decls) {
    for (const auto& param : p.params) {
      auto type = resolve(*param.type);
      if (decls && type->arity != 1) {
        throw LangError(LangErrorCode::Unsupported, param.span,
                        "unsupported construct: running a predicate with a non-unary "
                        "parameter " + quoted(param.name));
      }
      auto var = fresh_var(param.name, param.span);
      if (decls) decls->push_back({param.name, var->index, type, param.span});
      env_.push_back({param.name, var});
    }
  }

  ExprPtr fresh_var(const std::string& name, Span span) {
    auto v = std::make_shared<Expr>();
    v->kind = ExprKind::Var;
    v->name = name;
    v->index = next_var_++;
    v->arity = 1;
    v->span = span;
    return v;
  }

  FormulaPtr resolve(const Formula& f) {
    auto out = std::make_shared<Formula>(f);
    switch (f.kind) {
      case FormulaKind::Quant: {
        std::size_t mark = env_.size();
        out->decls.clear();
        for (const auto& d : f.decls) {
          auto bound = resolve(*d.bound);
          if (bound->arity != 1) {
            error(LangErrorCode::ArityMismatch, d.span,
                  "quantified variable " + quoted(d.var) + " must range over a unary expression");
          }
          auto var = fresh_var(d.var, d.span);
          out->decls.push_back({d.var, var->index, bound, d.span});
          env_.push_back({d.var, var});
        }
        out->lhs = resolve(*f.lhs);
        env_.resize(mark);
        return out;
      }
      case FormulaKind::Binary:
        out->lhs = resolve(*f.lhs);
        out->rhs = resolve(*f.rhs);
        return out;
      case FormulaKind::Not:
      case FormulaKind::Paren:
        out->lhs = resolve(*f.lhs);
        return out;
      case FormulaKind::Compare: {
        out->left = resolve(*f.left);
        out->right = resolve(*f.right);
        if (out->left->arity != out->right->arity) {
          error(LangErrorCode::ArityMismatch, f.span,
                "cannot compare expressions of arity " + std::to_string(out->left->arity) +
                    " and " + std::to_string(out->right->arity));
        }
        return out;
      }
      case FormulaKind::Mult:
        out->left = resolve(*f.left);
        return out;
      case FormulaKind::Block:
        out->children.clear();
        for (const auto& c : f.children) out->children.push_back(resolve(*c));
        return out;
      case FormulaKind::PredCall:
        return inline_call(f);
    }
    return out;
  }

  FormulaPtr inline_call(const Formula& call) {
    auto it = preds_.find(call.name);
    if (it == preds_.end()) {
      if (lookup_local(call.name) || out_.find_sig(call.name) >= 0 ||
          out_.find_field(call.name) >= 0 || asserts_.count(call.name)) {
        error(LangErrorCode::TypeMismatch, call.span, quoted(call.name) + " is not a predicate");
      }
      error(LangErrorCode::UnknownName, call.span, "unknown predicate " + quoted(call.name));
    }
    const Paragraph& pred = *it->second;
    if (std::find(call_stack_.begin(), call_stack_.end(), pred.name) != call_stack_.end()) {
      error(LangErrorCode::RecursivePredicate, call.span,
            "recursive call of predicate " + quoted(pred.name));
    }
    if (call.args.size() != pred.params.size()) {
      error(LangErrorCode::ArityMismatch, call.span,
            "predicate " + quoted(pred.name) + " expects " + std::to_string(pred.params.size()) +
                " argument(s), got " + std::to_string(call.args.size()));
    }
    std::vector<ExprPtr> args;
    for (const auto& a : call.args) args.push_back(resolve(*a));

    auto saved_env = std::move(env_);
    env_.clear();
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto type = resolve(*pred.params[i].type);
      if (type->arity != args[i]->arity) {
        env_ = std::move(saved_env);
        error(LangErrorCode::ArityMismatch, call.args[i]->span,
              "argument " + std::to_string(i + 1) + " of " + quoted(pred.name) +
                  " has arity " + std::to_string(args[i]->arity) + ", expected " +
                  std::to_string(type->arity));
      }
    }
    for (std::size_t i = 0; i < args.size(); ++i) env_.push_back({pred.params[i].name, args[i]});
    call_stack_.push_back(pred.name);
    auto body = resolve(*pred.body);
    call_stack_.pop_back();
    env_ = std::move(saved_env);

    auto wrapped = std::make_shared<Formula>();
    wrapped->kind = FormulaKind::Paren;
    wrapped->lhs = body;
    wrapped->span = call.span;
    return wrapped;
  }

  [[nodiscard]] ExprPtr lookup_local(const std::string& name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->name == name) return it->value;
    }
    return nullptr;
  }

  ExprPtr resolve(const Expr& e) {
    auto out = std::make_shared<Expr>(e);
    switch (e.kind) {
      case ExprKind::Name: {
        if (auto local = lookup_local(e.name)) return local;
        if (int s = out_.find_sig(e.name); s >= 0) {
          out->kind = ExprKind::SigRef;
          out->index = s;
          out->arity = 1;
          return out;
        }
        if (int f = out_.find_field(e.name); f >= 0) {
          out->kind = ExprKind::FieldRef;
          out->index = f;
          out->arity = out_.fields[f].arity();
          return out;
        }
        if (preds_.count(e.name) || asserts_.count(e.name)) {
          error(LangErrorCode::TypeMismatch, e.span,
                quoted(e.name) + " is a paragraph, not a relation");
        }
        error(LangErrorCode::UnknownName, e.span, "unknown name " + quoted(e.name));
      }
      case ExprKind::Var:
      case ExprKind::SigRef:
      case ExprKind::FieldRef:
        return out;
      case ExprKind::Univ:
      case ExprKind::None:
        out->arity = 1;
        return out;
      case ExprKind::Iden:
        out->arity = 2;
        return out;
      case ExprKind::Transpose:
      case ExprKind::Closure:
      case ExprKind::ReflexiveClosure:
        out->lhs = resolve(*e.lhs);
        if (out->lhs->arity != 2) {
          error(LangErrorCode::ArityMismatch, e.span,
                "operand of '~', '^' or '*' must be binary, got arity " +
                    std::to_string(out->lhs->arity));
        }
        out->arity = 2;
        return out;
      case ExprKind::Union:
      case ExprKind::Diff:
      case ExprKind::Intersect:
        out->lhs = resolve(*e.lhs);
        out->rhs = resolve(*e.rhs);
        if (out->lhs->arity != out->rhs->arity) {
          error(LangErrorCode::ArityMismatch, e.span,
                "set operands have arity " + std::to_string(out->lhs->arity) + " and " +
                    std::to_string(out->rhs->arity));
        }
        out->arity = out->lhs->arity;
        return out;
      case ExprKind::Product:
        out->lhs = resolve(*e.lhs);
        out->rhs = resolve(*e.rhs);
        out->arity = out->lhs->arity + out->rhs->arity;
        return out;
      case ExprKind::Join:
        out->lhs = resolve(*e.lhs);
        out->rhs = resolve(*e.rhs);
        return check_join(out);
      case ExprKind::BoxJoin: {
        ExprPtr result = resolve(*e.lhs);
        for (const auto& arg : e.args) {
          auto join = std::make_shared<Expr>();
          join->kind = ExprKind::Join;
          join->span = e.span;
          join->lhs = resolve(*arg);
          join->rhs = result;
          result = check_join(join);
        }
        return result;
      }
    }
    return out;
  }

  static ExprPtr check_join(std::shared_ptr<Expr> join) {
    int arity = join->lhs->arity + join->rhs->arity - 2;
    if (arity < 1) {
      error(LangErrorCode::ArityMismatch, join->span,
            "join of arity " + std::to_string(join->lhs->arity) + " and " +
                std::to_string(join->rhs->arity) + " yields an empty tuple");
    }
    join->arity = arity;
    return join;
  }

  // -- commands --------------------------------------------------------------

  ResolvedCommand resolve_command(const Paragraph& p) {
    const Command& cmd = p.command;
    ResolvedCommand rc;
    rc.name = cmd.name;
    rc.kind = cmd.kind;
    rc.scope = cmd.scope;
    rc.secret = p.secret;
    rc.span = p.span;
    env_.clear();
    if (cmd.body) {
      rc.body = resolve(*cmd.body);
    } else if (cmd.kind == CommandKind::Check) {
      auto it = asserts_.find(cmd.target);
      if (it == asserts_.end()) {
        error(preds_.count(cmd.target) ? LangErrorCode::TypeMismatch : LangErrorCode::UnknownName,
              p.span, "check target " + quoted(cmd.target) + " is not an assertion");
      }
      rc.body = resolve(*it->second->body);
    } else {
      auto it = preds_.find(cmd.target);
      if (it == preds_.end()) {
        error(asserts_.count(cmd.target) ? LangErrorCode::TypeMismatch
                                         : LangErrorCode::UnknownName,
              p.span, "run target " + quoted(cmd.target) + " is not a predicate");
      }
      const Paragraph& pred = *it->second;
      std::vector<QuantDecl> decls;
      call_stack_ = {pred.name};
      bind_params(pred, &decls);
      auto body = resolve(*pred.body);
      call_stack_.clear();
      if (decls.empty()) {
        rc.body = body;
      } else {
        auto q = std::make_shared<Formula>();
        q->kind = FormulaKind::Quant;
        q->quant = QuantKind::Some;
        q->decls = std::move(decls);
        q->lhs = body;
        q->span = pred.span;
        rc.body = q;
      }
    }
    env_.clear();
    std::set<std::string> seen;
    for (const auto& o : rc.scope.overrides) {
      int sig = out_.find_sig(o.sig);
      if (sig < 0) error(LangErrorCode::UnknownName, o.span, "unknown signature " + quoted(o.sig));
      if (!out_.sigs[sig].is_top_level()) {
        error(LangErrorCode::TypeMismatch, o.span,
              "scope may only bound top-level signatures, " + quoted(o.sig) + " extends another");
      }
      if (!seen.insert(o.sig).second) {
        error(LangErrorCode::DuplicateName, o.span, "signature " + quoted(o.sig) + " scoped twice");
      }
    }
    return rc;
  }

  const SourceModel& src_;
  ResolvedModel out_;
  std::set<std::string> declared_;
  std::vector<const SigDecl*> sig_decls_;
  std::vector<const Paragraph*> facts_;
  std::vector<const Paragraph*> commands_;
  std::map<std::string, const Paragraph*> preds_;
  std::map<std::string, const Paragraph*> asserts_;
  std::vector<Binding> env_;
  std::vector<std::string> call_stack_;
  int next_var_ = 0;
};

}  // namespace

ResolvedModel resolve(const SourceModel& model) { return Resolver(model).run(); }

}  // namespace a4f
