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

// HTTP review service over a ReviewStore.
//
//   GET  /api/queue?status=pending|done|all&page=1&page_size=50
//   GET  /api/items/{id}
//   POST /api/items/{id}/decision
//   GET  /api/stats
//   POST /api/merge
//
// Everything else is served from the static directory when one is given.

#ifndef RELABEL_HTTP_SERVICE_H_
#define RELABEL_HTTP_SERVICE_H_

#include <memory>
#include <string>

#include "relabel/records.h"
#include "relabel/review_store.h"

namespace relabel {

Json item_to_json(const ReviewItem& item, const TagSet& ts);
// Queue listing entry: the item without its evidence list.
Json item_summary_json(const ReviewItem& item, const TagSet& ts);
Json stats_to_json(const QueueStats& stats);

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string static_dir;
  DataPaths paths;
};

class ReviewService {
 public:
  ReviewService(ReviewStore& store, ServiceOptions options);
  ~ReviewService();

  // Binds the listening socket and returns the bound port, or -1.
  int bind();
  // Serves until stop(). Requires a successful bind().
  bool serve();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace relabel

#endif  // RELABEL_HTTP_SERVICE_H_
