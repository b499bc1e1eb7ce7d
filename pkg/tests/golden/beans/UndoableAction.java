// Generated from CID component PartHandler.
package PartHandlerBean;

/**
 * CID interface UndoableAction.
 *
 * @cid.multiplicity 0..*
 */
public interface UndoableAction {

    void undo();

    void redo();
}
