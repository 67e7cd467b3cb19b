#include "a4f/repo/repository.hpp"

#include <sodium.h>

#include <algorithm>
#include <ctime>

#include "a4f/finder/instance.hpp"

namespace a4f {

using nlohmann::json;

namespace {

constexpr char kAlphabet[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

const std::string kModels = "model";
const std::string kLinks = "link";
const std::string kInstances = "instance";

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> optional_string(const json& doc, const char* key) {
  if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
  return doc[key].get<std::string>();
}

json to_json(const ModelRecord& r) {
  return {{"id", r.id},
          {"parent", optional_json(r.parent)},
          {"root", r.root},
          {"time", r.time},
          {"code", r.code},
          {"command", optional_json(r.command)},
          {"result", optional_json(r.result)},
          {"theme", r.theme ? *r.theme : json(nullptr)}};
}

ModelRecord model_from_json(const json& doc) {
  ModelRecord r;
  r.id = doc.at("id").get<std::string>();
  r.parent = optional_string(doc, "parent");
  r.root = doc.at("root").get<std::string>();
  r.time = doc.at("time").get<std::string>();
  r.code = doc.at("code").get<std::string>();
  r.command = optional_string(doc, "command");
  r.result = optional_string(doc, "result");
  if (doc.contains("theme") && !doc["theme"].is_null()) r.theme = doc["theme"];
  return r;
}

std::vector<std::string> sig_names(const SourceModel& model) {
  std::vector<std::string> out;
  for (const auto& p : model.paragraphs) {
    for (const auto& s : p.sigs) out.push_back(s.name);
  }
  return out;
}

bool valid_result(const std::string& r) { return r == "sat" || r == "unsat" || r == "error" || r == "limit"; }

}  // namespace

std::string random_token() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw std::runtime_error("libsodium failed to initialise");
  std::string out(kTokenLength, '0');
  for (auto& c : out) c = kAlphabet[randombytes_uniform(sizeof(kAlphabet) - 1)];
  return out;
}

std::string iso8601(std::chrono::system_clock::time_point t) {
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(ms / 1000);
  auto frac = static_cast<int>(ms % 1000);
  if (frac < 0) {
    frac += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

std::string_view to_string(Visibility v) { return v == Visibility::Private ? "private" : "public"; }

std::string_view to_string(RepoErrorCode code) {
  switch (code) {
    case RepoErrorCode::NotFound: return "NotFound";
    case RepoErrorCode::Forbidden: return "Forbidden";
    case RepoErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "RepoError";
}

json InstanceRecord::document() const {
  return {{"model", model_id}, {"command", command}, {"skip", skip},
          {"instance", instance}, {"theme", theme},  {"layout", layout}};
}

Repository::Repository(std::shared_ptr<Store> store, RepositoryOptions options)
    : store_(std::move(store)), options_(std::move(options)) {
  store_->for_each(kModels, [&](const std::string& id, const json& doc) {
    trees_[doc.at("root").get<std::string>()].push_back(id);
  });
}

std::string Repository::fresh_token_locked() {
  for (;;) {
    std::string t = options_.tokens();
    if (!store_->get(kModels, t) && !store_->get(kLinks, t) && !store_->get(kInstances, t)) return t;
  }
}

void Repository::insert_model_locked(const ModelRecord& record) {
  if (!store_->insert(kModels, record.id, to_json(record))) throw std::logic_error("model id reused");
  std::lock_guard lock(tree_mutex_);
  trees_[record.root].push_back(record.id);
}

Repository::Shared Repository::save_shared(const std::string& code, const std::optional<Theme>& theme) {
  SourceModel parsed = parse(code, options_.parse);
  if (theme) check_projection(*theme, sig_names(parsed));
  const bool secrets = std::any_of(parsed.paragraphs.begin(), parsed.paragraphs.end(),
                                   [](const Paragraph& p) { return p.secret; });

  std::lock_guard lock(write_mutex_);
  Shared out;
  ModelRecord r;
  r.id = fresh_token_locked();
  r.root = r.id;
  r.time = iso8601(options_.clock());
  r.code = code;
  if (theme) r.theme = to_json(*theme);
  insert_model_locked(r);
  out.model_id = r.id;
  out.public_token = fresh_token_locked();
  store_->insert(kLinks, out.public_token, {{"model", r.id}, {"visibility", "public"}});
  if (secrets) {
    out.private_token = fresh_token_locked();
    store_->insert(kLinks, *out.private_token, {{"model", r.id}, {"visibility", "private"}});
  }
  return out;
}

std::optional<LinkRecord> Repository::link(const std::string& token) const {
  auto doc = store_->get(kLinks, token);
  if (!doc) return std::nullopt;
  return LinkRecord{token, doc->at("model").get<std::string>(),
                    doc->at("visibility") == "private" ? Visibility::Private : Visibility::Public};
}

std::optional<ModelRecord> Repository::model(const std::string& id) const {
  auto doc = store_->get(kModels, id);
  if (!doc) return std::nullopt;
  return model_from_json(*doc);
}

ModelView Repository::load(const std::string& token) const {
  auto l = link(token);
  if (!l) throw RepoError(RepoErrorCode::NotFound, "no model for this link");
  auto m = model(l->model_id);
  if (!m) throw RepoError(RepoErrorCode::NotFound, "the linked model is missing");
  SplitModel s = split(m->code, options_.parse);
  ModelView v;
  v.model_id = m->id;
  v.visibility = l->visibility;
  v.code = l->visibility == Visibility::Private ? m->code : s.public_text;
  v.command_index = std::move(s.command_index);
  v.theme = m->theme;
  v.has_secrets = s.has_secrets();
  return v;
}

std::string Repository::resolve_parent(const std::string& link_token, const std::string& parent) const {
  auto l = link(link_token);
  if (!l) throw RepoError(RepoErrorCode::NotFound, "no model for this link");
  std::string parent_id = l->model_id;
  if (!parent.empty()) {
    auto via_link = link(parent);
    parent_id = via_link ? via_link->model_id : parent;
  }
  auto shared = model(l->model_id);
  auto p = model(parent_id);
  if (!shared || !p) throw RepoError(RepoErrorCode::NotFound, "unknown parent");
  if (p->root != shared->root) {
    throw RepoError(RepoErrorCode::InvalidArgument, "the parent belongs to a different shared model");
  }
  return parent_id;
}

std::string Repository::record_execution(const std::string& link_token, const std::string& parent,
                                         const std::string& code, const std::string& command,
                                         const std::string& result) {
  if (!valid_result(result)) throw RepoError(RepoErrorCode::InvalidArgument, "unknown result '" + result + "'");
  auto p = model(resolve_parent(link_token, parent));
  if (!p) throw RepoError(RepoErrorCode::NotFound, "unknown parent");

  std::lock_guard lock(write_mutex_);
  ModelRecord r;
  r.id = fresh_token_locked();
  r.parent = p->id;
  r.root = p->root;
  r.time = std::max(iso8601(options_.clock()), p->time);
  r.code = code;
  r.command = command;
  r.result = result;
  insert_model_locked(r);
  return r.id;
}

json Repository::export_tree(const std::string& private_token) const {
  auto l = link(private_token);
  if (!l) throw RepoError(RepoErrorCode::NotFound, "no model for this link");
  if (l->visibility != Visibility::Private) {
    throw RepoError(RepoErrorCode::Forbidden, "only the private link may download the derivation tree");
  }
  auto root = model(l->model_id);
  if (!root) throw RepoError(RepoErrorCode::NotFound, "the linked model is missing");
  std::vector<std::string> ids;
  {
    std::lock_guard lock(tree_mutex_);
    auto it = trees_.find(root->root);
    if (it != trees_.end()) ids = it->second;
  }
  std::vector<ModelRecord> records;
  for (const auto& id : ids) {
    if (auto r = model(id)) records.push_back(std::move(*r));
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const ModelRecord& a, const ModelRecord& b) { return a.time < b.time; });
  json nodes = json::array();
  for (const auto& r : records) {
    nodes.push_back({{"id", r.id},
                     {"parent", optional_json(r.parent)},
                     {"time", r.time},
                     {"code", r.code},
                     {"command", optional_json(r.command)},
                     {"result", optional_json(r.result)}});
  }
  return {{"root", root->root}, {"nodes", nodes}};
}

std::string Repository::save_instance(InstanceRecord record) {
  auto m = model(record.model_id);
  if (!m) throw RepoError(RepoErrorCode::NotFound, "unknown model");
  (void)instance_from_json(record.instance);
  if (record.theme.is_null()) record.theme = json::object();
  check_projection(theme_from_json(record.theme), sig_names(parse(m->code, ParseOptions{m->code.size() + 1})));
  if (record.layout.is_null()) record.layout = json::object();
  (void)layout_from_json(record.layout);

  std::lock_guard lock(write_mutex_);
  record.token = fresh_token_locked();
  store_->insert(kInstances, record.token, record.document());
  return record.token;
}

InstanceRecord Repository::load_instance(const std::string& token) const {
  auto doc = store_->get(kInstances, token);
  if (!doc) throw RepoError(RepoErrorCode::NotFound, "no instance for this link");
  InstanceRecord r;
  r.token = token;
  r.model_id = doc->at("model").get<std::string>();
  r.command = doc->at("command").get<std::string>();
  r.skip = doc->at("skip").get<std::uint64_t>();
  r.instance = doc->at("instance");
  r.theme = doc->at("theme");
  r.layout = doc->at("layout");
  return r;
}

}  // namespace a4f
