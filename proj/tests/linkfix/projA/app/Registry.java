package app;

import java.util.List;

public class Registry {
  private List items;

  public List all() {
    return this.items;
  }
}
