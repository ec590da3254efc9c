// Copyright 2026 The Relabel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relabel/http_service.h"

#include <charconv>
#include <filesystem>
#include <optional>

#include "httplib.h"

namespace relabel {
namespace {

constexpr int kMaxPageSize = 500;

constexpr const char* kPlaceholder =
    "<!doctype html><html><head><title>relabel review</title></head>"
    "<body><h1>relabel review service</h1>"
    "<p>No static UI directory was configured. The JSON API is under "
    "<code>/api/</code>.</p></body></html>";

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send_json(res, status, Json{{"error", msg}});
}

std::optional<int> parse_int(const std::string& s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

Json decision_json(const ReviewDecision& d, const TagSet& ts) {
  return to_json(d, ts);
}

}  // namespace

Json item_summary_json(const ReviewItem& item, const TagSet& ts) {
  return Json{{"utterance_id", item.utterance_id},
              {"tokens", item.tokens},
              {"current_tags", label_names(item.current_tags, ts)},
              {"max_gap", gap_to_json(item.max_gap)},
              {"status", std::string(to_string(item.status))},
              {"decision", item.decision ? decision_json(*item.decision, ts)
                                         : Json(nullptr)}};
}

Json item_to_json(const ReviewItem& item, const TagSet& ts) {
  Json evidence = Json::array();
  for (const auto& r : item.evidence) {
    evidence.push_back(Json{{"span", to_json(r.span)},
                            {"p_tag", ts.name(r.p_tag)},
                            {"g_tag", ts.name(r.g_tag)},
                            {"gap", gap_to_json(r.gap)}});
  }
  Json j = item_summary_json(item, ts);
  j["evidence"] = std::move(evidence);
  return j;
}

Json stats_to_json(const QueueStats& s) {
  return Json{{"pending", s.pending},
              {"done", s.done},
              {"corrected", s.corrected},
              {"accepted", s.accepted},
              {"flag_fraction_of_train", s.flag_fraction_of_train}};
}

struct ReviewService::Impl {
  ReviewStore& store;
  ServiceOptions options;
  httplib::Server server;
  int port = -1;

  Impl(ReviewStore& s, ServiceOptions o) : store(s), options(std::move(o)) {
    routes();
  }

  void routes() {
    const TagSet& ts = store.tag_set();

    server.Get("/api/queue", [this, &ts](const httplib::Request& req,
                                         httplib::Response& res) {
      std::string status = req.has_param("status") ? req.get_param_value("status")
                                                   : "all";
      std::optional<ItemStatus> filter;
      if (status == "pending") {
        filter = ItemStatus::kPending;
      } else if (status == "done") {
        filter = ItemStatus::kDone;
      } else if (status != "all") {
        return send_error(res, 400, "status must be pending, done or all");
      }
      int page = 1;
      int page_size = 50;
      if (req.has_param("page")) {
        auto v = parse_int(req.get_param_value("page"));
        if (!v || *v < 1) return send_error(res, 400, "page must be >= 1");
        page = *v;
      }
      if (req.has_param("page_size")) {
        auto v = parse_int(req.get_param_value("page_size"));
        if (!v || *v < 1 || *v > kMaxPageSize) {
          return send_error(res, 400, "page_size must be in [1, 500]");
        }
        page_size = *v;
      }

      auto snap = store.snapshot();
      std::vector<const ReviewItem*> matching;
      for (const auto& item : snap->items) {
        if (!filter || item.status == *filter) matching.push_back(&item);
      }
      Json items = Json::array();
      const std::size_t first =
          static_cast<std::size_t>(page - 1) * static_cast<std::size_t>(page_size);
      for (std::size_t i = first;
           i < matching.size() && i < first + static_cast<std::size_t>(page_size);
           ++i) {
        items.push_back(item_summary_json(*matching[i], ts));
      }
      send_json(res, 200,
                Json{{"items", std::move(items)},
                     {"page", page},
                     {"page_size", page_size},
                     {"total", matching.size()}});
    });

    server.Get(R"(/api/items/([^/]+))", [this, &ts](const httplib::Request& req,
                                                    httplib::Response& res) {
      const std::string id = req.matches[1];
      auto snap = store.snapshot();
      auto it = snap->index.find(id);
      if (it == snap->index.end()) {
        return send_error(res, 404, "no queued item '" + id + "'");
      }
      send_json(res, 200, item_to_json(snap->items[it->second], ts));
    });

    server.Post(R"(/api/items/([^/]+)/decision)",
                [this, &ts](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      Json body;
      try {
        body = Json::parse(req.body);
      } catch (const nlohmann::json::parse_error&) {
        return send_error(res, 400, "request body is not valid JSON");
      }
      if (!body.is_object()) {
        return send_error(res, 400, "decision must be a JSON object");
      }
      if (body.contains("utterance_id") && body["utterance_id"] != id) {
        return send_error(res, 400, "utterance_id does not match the URL");
      }
      body["utterance_id"] = id;
      ReviewDecision decision;
      try {
        decision = decision_from_json(body, ts);
      } catch (const RecordError& e) {
        return send_error(res, 400, e.what());
      } catch (const CorpusError& e) {
        return send_error(res, 422, e.what());
      }
      try {
        auto result = store.post(std::move(decision));
        send_json(res, 200, item_to_json(result.item, ts));
      } catch (const ItemNotFound& e) {
        send_error(res, 404, e.what());
      } catch (const MergeError& e) {
        send_error(res, 422, e.what());
      }
    });

    server.Get("/api/stats", [this](const httplib::Request&,
                                    httplib::Response& res) {
      send_json(res, 200, stats_to_json(store.stats()));
    });

    server.Post("/api/merge", [this, &ts](const httplib::Request&,
                                          httplib::Response& res) {
      const DataPaths& p = options.paths;
      try {
        const auto s = merge_files(p.train(), p.decisions(), p.merged(), ts);
        send_json(res, 200,
                  Json{{"output", p.merged()},
                       {"utterances", s.utterances},
                       {"decisions", s.decisions},
                       {"corrected", s.corrected}});
      } catch (const std::exception& e) {
        send_error(res, 500, e.what());
      }
    });

    if (!options.static_dir.empty() &&
        std::filesystem::is_directory(options.static_dir)) {
      server.set_mount_point("/", options.static_dir);
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kPlaceholder, "text/html");
      });
    }
  }
};

ReviewService::ReviewService(ReviewStore& store, ServiceOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {}

ReviewService::~ReviewService() = default;

int ReviewService::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else {
    impl_->port = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  return impl_->port;
}

bool ReviewService::serve() {
  if (impl_->port < 0) return false;
  return impl_->server.listen_after_bind();
}

void ReviewService::wait_until_ready() const {
  impl_->server.wait_until_ready();
}

void ReviewService::stop() { impl_->server.stop(); }

}  // namespace relabel
